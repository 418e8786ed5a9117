#include "hbobyqa/yield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace hbobyqa {

namespace {

constexpr double kCentre1 = 9.9;
constexpr double kCentre2 = 5.6;
constexpr double kBase = -18.0;
constexpr double kDepth = 8.0;
constexpr double kRipple = 0.4;

double width(const Vector& d) {
  const double a = d[0] - 1.5;
  const double b = d[1] - 0.5;
  return std::exp(-(a * a + b * b) / 2.0);
}

void check_point(const Vector& x) {
  if (x.size() != 4) throw Error(ErrorCode::InvalidArgument, "yield point must have 4 entries");
}

}  // namespace

double surrogate_performance(double r, const Vector& p, const Vector& d) {
  const double a = p[0] - kCentre1;
  const double b = p[1] - kCentre2;
  return kBase - kDepth * std::exp(-(a * a + b * b) / (8.0 * width(d))) + kRipple * std::sin(r);
}

std::vector<double> default_range_grid() {
  std::vector<double> grid(11);
  for (int k = 0; k < 11; ++k) grid[k] = 2.0 * std::numbers::pi * (6.5 + 0.1 * k);
  return grid;
}

Bounds yield_bounds() { return Bounds(Vector{{6.0, 2.0, 0.0, 0.0}}, Vector{{14.0, 9.0, 3.0, 3.0}}); }

Vector yield_start() { return Vector{{9.0, 5.0, 1.0, 1.0}}; }

YieldProblem make_yield_problem(YieldNoise noise, std::uint64_t seed) {
  YieldProblem p;
  p.seed = seed;
  switch (noise) {
    case YieldNoise::NoNoise:
      p.mode = SamplingMode::FixedShifted;
      p.samples = 2500;
      break;
    case YieldNoise::LowNoise:
      p.mode = SamplingMode::Resampled;
      p.samples = 2500;
      break;
    case YieldNoise::HighNoise:
      p.mode = SamplingMode::Resampled;
      p.samples = 100;
      break;
  }
  return p;
}

YieldEstimator::YieldEstimator(YieldProblem problem) : problem_(std::move(problem)), rng_(problem_.seed) {
  if (problem_.samples == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
  if (!(problem_.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  base_.resize(static_cast<Eigen::Index>(problem_.samples), 2);
  if (problem_.mode == SamplingMode::FixedShifted) {
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < base_.rows(); ++i) {
      base_(i, 0) = normal(rng_);
      base_(i, 1) = normal(rng_);
    }
  }
}

YieldEstimate YieldEstimator::estimate(const Vector& x) {
  check_point(x);
  if (problem_.mode == SamplingMode::Resampled) {
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < base_.rows(); ++i) {
      base_(i, 0) = normal(rng_);
      base_(i, 1) = normal(rng_);
    }
  }
  const Vector mean = x.head(2);
  const Vector d = x.tail(2);
  Vector safe_sum = Vector::Zero(2);
  std::size_t safe = 0;
  Vector p(2);
  for (Eigen::Index i = 0; i < base_.rows(); ++i) {
    p[0] = mean[0] + problem_.sigma * base_(i, 0);
    p[1] = mean[1] + problem_.sigma * base_(i, 1);
    const bool ok = std::all_of(problem_.range_grid.begin(), problem_.range_grid.end(),
                                [&](double r) { return problem_.performance(r, p, d) <= problem_.threshold; });
    if (ok) {
      ++safe;
      safe_sum += p;
    }
  }
  YieldEstimate out;
  out.safe_count = safe;
  out.yield = static_cast<double>(safe) / static_cast<double>(problem_.samples);
  if (safe == 0) {
    out.safe_mean = mean;
    out.gradient = Vector::Zero(2);
  } else {
    out.safe_mean = safe_sum / static_cast<double>(safe);
    out.gradient = out.yield * (out.safe_mean - mean) / (problem_.sigma * problem_.sigma);
  }
  return out;
}

double yield_estimate(YieldEstimator& estimator, const Vector& x) { return estimator.estimate(x).yield; }

Vector yield_gradient_means(YieldEstimator& estimator, const Vector& x) {
  return estimator.estimate(x).gradient;
}

ObjectiveSpec yield_objective(const YieldProblem& problem) {
  struct State {
    YieldEstimator estimator;
    std::optional<Vector> last_x;
    YieldEstimate last;

    const YieldEstimate& at(const Vector& x, bool reuse) {
      if (!(reuse && last_x && last_x->size() == x.size() && *last_x == x)) {
        last = estimator.estimate(x);
        last_x = x;
      }
      return last;
    }
  };
  auto state = std::make_shared<State>(State{YieldEstimator(problem), std::nullopt, {}});

  ObjectiveSpec spec;
  spec.dimension = 4;
  spec.bounds = yield_bounds();
  spec.availability = DerivativeAvailability(4, {0, 1});
  // A value query always runs a fresh estimate; derivative queries reuse the
  // estimate of the preceding value query at the same point.
  spec.value = [state](const Vector& x) { return -state->at(x, false).yield; };
  spec.first_derivative = [state](const Vector& x, int i) { return -state->at(x, true).gradient[i]; };
  return spec;
}

ObjectiveSpec yield_objective(YieldNoise noise, std::uint64_t seed) {
  return yield_objective(make_yield_problem(noise, seed));
}

double exact_surrogate_yield(const Vector& x, double sigma, double threshold,
                             const std::vector<double>& range_grid) {
  check_point(x);
  double max_sin = -1.0;
  for (double r : range_grid) max_sin = std::max(max_sin, std::sin(r));
  // Safe iff exp(-D^2 / (8 w)) >= level.
  const double level = (kBase - threshold + kRipple * max_sin) / kDepth;
  if (level <= 0.0) return 1.0;
  if (level >= 1.0) return 0.0;
  const double radius2 = -8.0 * width(x.tail(2)) * std::log(level);

  const double a = std::hypot(x[0] - kCentre1, x[1] - kCentre2) / sigma;
  const double rho = std::sqrt(radius2) / sigma;
  // P(|Z + a e| <= rho) for a standard bivariate normal Z: integral of the
  // Rician density t exp(-(t^2 + a^2)/2) I0(a t), composite Simpson.
  const int m = 4000;
  const double h = rho / m;
  auto density = [a](double t) {
    return t * std::exp(-(t * t + a * a) / 2.0) * std::cyl_bessel_i(0.0, a * t);
  };
  double sum = density(0.0) + density(rho);
  for (int k = 1; k < m; ++k) sum += density(k * h) * (k % 2 == 1 ? 4.0 : 2.0);
  return std::clamp(sum * h / 3.0, 0.0, 1.0);
}

}  // namespace hbobyqa
