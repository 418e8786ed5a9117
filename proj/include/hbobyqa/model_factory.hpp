#pragma once

// Assembly and solution of the four model-building linear systems.
//
// All systems are built around the incumbent x_opt: every row uses shifted
// points s = y - x_opt and the model constant is c = f(x_opt). Scaling and
// weighting are recorded as diagonal row/column factors so that the same
// factorization can later be reused for Lagrange polynomials.

#include <Eigen/SVD>

#include <cstddef>
#include <string_view>
#include <vector>

#include "hbobyqa/basis.hpp"
#include "hbobyqa/problem.hpp"

namespace hbobyqa {

enum class SystemKind { FullInterp, MinFrob, HermiteLS, HermiteBobyqa };

std::string_view to_string(SystemKind kind);

enum class RowType { Value, FirstDerivative, SecondDerivative, Constraint };

/// What a row encodes. `point` is a training-set index (-1 for the linear
/// constraint rows of the min-Frobenius block); `i`/`j` are 0-based directions.
struct RowTag {
  RowType type = RowType::Value;
  int point = -1;
  int i = -1;
  int j = -1;
};

struct AssembledSystem {
  SystemKind kind = SystemKind::FullInterp;
  std::size_t n = 0;
  std::size_t p1 = 0;
  std::size_t incumbent = 0;
  Vector shift;      // x_opt
  double f_opt = 0.0;

  // Effective system: matrix = D L M R, rhs = D L b.
  Matrix matrix;
  Vector rhs;
  std::vector<RowTag> rows;
  Vector row_scale;   // L
  Vector row_weight;  // D
  Vector col_scale;   // R; the solution of the original system is R * u
  double radius = 1.0;  // Delta passed to apply_scaling (1 when unscaled)

  // Min-Frobenius recovery data.
  Matrix h_prev;
  std::vector<Vector> shifted;  // s_i for the p non-incumbent points, in row order
};

AssembledSystem assemble_full_interp(const TrainingSet& ts);
AssembledSystem assemble_min_frob(const TrainingSet& ts, const Matrix& h_prev);
AssembledSystem assemble_hermite_ls(const TrainingSet& ts, const DerivativeAvailability& availability,
                                    bool include_second_order);
AssembledSystem assemble_hermite_bobyqa(const TrainingSet& ts,
                                        const DerivativeAvailability& availability,
                                        const Matrix& h_prev);

/// Row scaling L and column scaling R for trust radius delta.
AssembledSystem apply_scaling(const AssembledSystem& sys, double delta);

struct WeightScheme {
  bool enabled = false;
  double s = 5.0;
};

/// w(y) = exp(-s * |y - x_opt| / max_i |y_i - x_opt|), applied to every row a point owns.
double point_weight(double distance, double max_distance, double s);

AssembledSystem apply_weighting(const AssembledSystem& sys, const WeightScheme& scheme,
                                const TrainingSet& ts);

/// SVD of the effective matrix, reusable for several right-hand sides.
class FactorizedSystem {
 public:
  /// Throws RankDeficient if the numerical rank (threshold 1e-12 * sigma_max)
  /// is below the column count.
  explicit FactorizedSystem(const AssembledSystem& sys);

  const AssembledSystem& system() const { return sys_; }

  /// Solves for raw (unscaled, unweighted) right-hand side b and returns the
  /// coefficient vector of the original system.
  Vector solve_raw(const Vector& raw_rhs) const;

  /// Same for the already transformed right-hand side stored in the system.
  Vector solve_effective(const Vector& rhs) const;

  /// sigma_min / sigma_max of the effective matrix.
  double inverse_condition() const;

 private:
  AssembledSystem sys_;
  Eigen::JacobiSVD<Matrix> svd_;
};

/// Maps a coefficient vector to (c, g, H). For min-Frobenius kinds H is built
/// as h_base + sum_i lambda_i s_i s_i'; for the others h_base is ignored.
QuadraticModel recover_model(const AssembledSystem& sys, const Vector& v, double c,
                             const Matrix& h_base);

/// Solves the stored system and recovers the model with c = f(x_opt) and
/// h_base = H_prev.
QuadraticModel solve_system(const AssembledSystem& sys);
QuadraticModel solve_system(const FactorizedSystem& fs);

/// Residual of the effective least-squares problem at the solution.
double effective_residual(const AssembledSystem& sys, const Vector& v);

}  // namespace hbobyqa
