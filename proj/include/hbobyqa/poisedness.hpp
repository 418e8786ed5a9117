#pragma once

// Lagrange and Lagrange-type polynomials of an assembled system, grid
// estimates of Lambda-poisedness, and the point-exchange helpers built on them.

#include <cstddef>
#include <vector>

#include "hbobyqa/model_factory.hpp"

namespace hbobyqa {

struct LagrangeMember {
  RowTag tag;            // Value members carry the training index in tag.point
  QuadraticModel poly;
};

/// One polynomial per datum of the system. Members [0, p1) are the value
/// polynomials of training points 0..p1-1 (in training-set order, the
/// incumbent included); derivative and second-order members follow in row order.
struct LagrangeFamily {
  SystemKind kind = SystemKind::FullInterp;
  std::size_t n = 0;
  std::size_t p1 = 0;
  std::size_t incumbent = 0;
  std::vector<LagrangeMember> members;

  std::size_t size() const { return members.size(); }
  Vector values(const Vector& x) const;
  /// max_i |l_i(x)| over all members, or over the value members only.
  double max_abs(const Vector& x, bool value_only = false) const;
};

/// Builds the family by solving the system for every unit datum. The data
/// map linearly to models, so a model equals sum_i datum_i * member_i.
LagrangeFamily lagrange_family(const AssembledSystem& sys);
/// Reuses an existing factorization of the system.
LagrangeFamily lagrange_family(const FactorizedSystem& fs);

/// Trust ball intersected with the box.
struct Region {
  Vector center;
  double radius = 1.0;
  Bounds bounds;

  /// Scales onto the ball, then clips to the box. Feasible whenever the
  /// center lies in the box.
  Vector project(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-12) const;
};

struct LambdaOptions {
  std::size_t axis_points = 0;    // 0 selects min(2n+1, floor(max_samples^(1/n))), at least 2
  std::size_t max_samples = 10000;
  int polish_steps = 5;
  bool value_only = false;
};

struct PoisednessEstimate {
  double lambda = 0.0;       // grid maximum improved by the polishing step
  double grid_lambda = 0.0;  // maximum over the grid alone
  Vector argmax;
  std::size_t member = 0;
  std::size_t axis_points = 0;
  std::size_t samples = 0;
};

/// Deterministic tensor grid on the cube around the region's center, mapped into the region.
std::vector<Vector> region_grid(const Region& region, std::size_t axis_points);
std::size_t default_axis_points(std::size_t n, std::size_t max_samples);

PoisednessEstimate estimate_lambda(const LagrangeFamily& family, const Region& region,
                                   const LambdaOptions& options = {});

/// argmax over the value polynomials of |l_i(y_add)|, never the incumbent;
/// ties go to the lowest index.
std::size_t select_outgoing(const LagrangeFamily& family, const Vector& y_add);

/// Approximate maximizer of |l_i| over the region.
Vector propose_geometry_point(const LagrangeFamily& family, std::size_t index, const Region& region);

struct Theorem1Result {
  double lambda_interp = 0.0;
  double lambda_regress = 0.0;
};

/// Grid Lambda of an interpolation system and of a system that extends it by
/// extra rows, on one shared grid. Throws InvalidArgument if the augmented
/// matrix does not start with the interpolation rows.
Theorem1Result theorem1_check(const AssembledSystem& interp, const AssembledSystem& augmented,
                              const Region& region, const LambdaOptions& options = {});

}  // namespace hbobyqa
