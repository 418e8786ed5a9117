#pragma once

// Monte-Carlo yield demo: two Gaussian design parameters with known means
// gradient, two deterministic parameters without derivatives.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "hbobyqa/problem.hpp"

namespace hbobyqa {

enum class SamplingMode { FixedShifted, Resampled };
enum class YieldNoise { NoNoise, LowNoise, HighNoise };

/// S(r, p, d); a sample p is safe when S <= threshold at every grid point r.
using PerformanceFunction = std::function<double(double r, const Vector& p, const Vector& d)>;

/// S = -18 - 8 exp(-|p - c|^2 / (8 w(d))) + 0.4 sin r with c = (9.9, 5.6) and
/// w(d) = exp(-((d1 - 1.5)^2 + (d2 - 0.5)^2) / 2). The safe set for each d is a
/// disk around c whose radius grows as d approaches (1.5, 0.5).
double surrogate_performance(double r, const Vector& p, const Vector& d);

/// 11 equidistant points r_k = 2 pi (6.5 + 0.1 k).
std::vector<double> default_range_grid();

struct YieldProblem {
  double sigma = 0.7;
  std::size_t samples = 2500;
  SamplingMode mode = SamplingMode::FixedShifted;
  std::uint64_t seed = 0;
  double threshold = -24.0;
  std::vector<double> range_grid = default_range_grid();
  PerformanceFunction performance = surrogate_performance;
};

/// Means in [6, 14] x [2, 9], deterministic parameters in [0, 3]^2.
Bounds yield_bounds();
/// (9, 5, 1, 1).
Vector yield_start();

YieldProblem make_yield_problem(YieldNoise noise, std::uint64_t seed);

struct YieldEstimate {
  double yield = 0.0;
  std::size_t safe_count = 0;
  Vector safe_mean;  // mean of the safe samples; the means themselves if none
  Vector gradient;   // dY/d(means), zero when no sample is safe
};

class YieldEstimator {
 public:
  explicit YieldEstimator(YieldProblem problem);

  const YieldProblem& problem() const { return problem_; }

  /// x = (mean1, mean2, d1, d2). Resampled mode draws a fresh sample set on
  /// every call.
  YieldEstimate estimate(const Vector& x);

 private:
  YieldProblem problem_;
  std::mt19937_64 rng_;
  Matrix base_;  // samples x 2 standard normal draws
};

double yield_estimate(YieldEstimator& estimator, const Vector& x);
/// Y (mean_S - mean) / sigma^2 from one sample set.
Vector yield_gradient_means(YieldEstimator& estimator, const Vector& x);

/// Minimize -Y over the four parameters; the two mean derivatives are known.
/// Value and gradient at the same point share one sample set, so the
/// gradient costs no extra evaluation.
ObjectiveSpec yield_objective(const YieldProblem& problem);
ObjectiveSpec yield_objective(YieldNoise noise, std::uint64_t seed);

/// Exact yield of surrogate_performance with Gaussian means (noncentral
/// chi-square probability of the safe disk).
double exact_surrogate_yield(const Vector& x, double sigma = 0.7, double threshold = -24.0,
                             const std::vector<double>& range_grid = default_range_grid());

}  // namespace hbobyqa
