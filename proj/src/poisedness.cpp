#include "hbobyqa/poisedness.hpp"

#include <algorithm>
#include <cmath>

#include "hbobyqa/subproblem.hpp"

namespace hbobyqa {

namespace {

using Index = Eigen::Index;

QuadraticModel negated(const QuadraticModel& m) { return {m.center, -m.c, -m.g, -m.H}; }

// Projected ascent on |l(x)| with step halving; returns the improved point.
Vector polish(const QuadraticModel& l, const Region& region, Vector x, int steps) {
  double best = std::abs(l.value(x));
  double t = 0.5 * region.radius;
  for (int k = 0; k < steps; ++k) {
    Vector g = l.gradient(x);
    if (l.value(x) < 0) g = -g;
    const double gn = g.norm();
    if (gn == 0.0) break;
    const Vector cand = region.project(x + (t / gn) * g);
    const double v = std::abs(l.value(cand));
    if (v > best) {
      best = v;
      x = cand;
    } else {
      t *= 0.5;
    }
  }
  return x;
}

}  // namespace

Vector LagrangeFamily::values(const Vector& x) const {
  Vector out(static_cast<Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) out[static_cast<Index>(i)] = members[i].poly.value(x);
  return out;
}

double LagrangeFamily::max_abs(const Vector& x, bool value_only) const {
  const std::size_t count = value_only ? p1 : members.size();
  double best = 0.0;
  for (std::size_t i = 0; i < count; ++i) best = std::max(best, std::abs(members[i].poly.value(x)));
  return best;
}

LagrangeFamily lagrange_family(const AssembledSystem& sys) { return lagrange_family(FactorizedSystem(sys)); }

LagrangeFamily lagrange_family(const FactorizedSystem& fs) {
  const AssembledSystem& sys = fs.system();
  const Index rows = sys.matrix.rows();
  const Matrix zero = Matrix::Zero(static_cast<Index>(sys.n), static_cast<Index>(sys.n));

  LagrangeFamily fam;
  fam.kind = sys.kind;
  fam.n = sys.n;
  fam.p1 = sys.p1;
  fam.incumbent = sys.incumbent;

  // A point's value datum may feed several rows (repeated measurements).
  std::vector<std::vector<Index>> value_rows(sys.p1);
  for (Index r = 0; r < rows; ++r) {
    const auto& tag = sys.rows[static_cast<std::size_t>(r)];
    if (tag.type == RowType::Value) value_rows[static_cast<std::size_t>(tag.point)].push_back(r);
  }

  for (std::size_t k = 0; k < sys.p1; ++k) {
    Vector rhs = Vector::Zero(rows);
    double c = 0.0;
    if (k == sys.incumbent) {
      // Unit value at x_opt enters every differenced value row with a minus sign.
      for (Index r = 0; r < rows; ++r) {
        if (sys.rows[static_cast<std::size_t>(r)].type == RowType::Value) rhs[r] = -1.0;
      }
      c = 1.0;
    } else {
      for (Index r : value_rows[k]) rhs[r] = 1.0;
    }
    fam.members.push_back({{RowType::Value, static_cast<int>(k), -1, -1},
                           recover_model(sys, fs.solve_raw(rhs), c, zero)});
  }
  for (Index r = 0; r < rows; ++r) {
    const auto& tag = sys.rows[static_cast<std::size_t>(r)];
    if (tag.type != RowType::FirstDerivative && tag.type != RowType::SecondDerivative) continue;
    Vector rhs = Vector::Zero(rows);
    rhs[r] = 1.0;
    fam.members.push_back({tag, recover_model(sys, fs.solve_raw(rhs), 0.0, zero)});
  }
  return fam;
}

Vector Region::project(const Vector& x) const {
  Vector y = x - center;
  const double norm = y.norm();
  if (norm > radius) y *= radius / norm;
  return bounds.clip(center + y);
}

bool Region::contains(const Vector& x, double tol) const {
  return (x - center).norm() <= radius * (1.0 + tol) + tol && bounds.contains(x, tol);
}

std::size_t default_axis_points(std::size_t n, std::size_t max_samples) {
  if (n == 0) return 1;
  auto k = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(max_samples), 1.0 / static_cast<double>(n)) + 1e-9));
  k = std::min(k, 2 * n + 1);
  return std::max<std::size_t>(k, 2);
}

std::vector<Vector> region_grid(const Region& region, std::size_t axis_points) {
  const auto n = static_cast<std::size_t>(region.center.size());
  const std::size_t k = std::max<std::size_t>(axis_points, 1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  std::vector<Vector> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t s = 0; s < total; ++s) {
    Vector x(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double t = k == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(idx[i]) / static_cast<double>(k - 1);
      x[static_cast<Index>(i)] = region.center[static_cast<Index>(i)] + region.radius * t;
    }
    grid.push_back(region.project(x));
    for (std::size_t i = 0; i < n; ++i) {
      if (++idx[i] < k) break;
      idx[i] = 0;
    }
  }
  return grid;
}

PoisednessEstimate estimate_lambda(const LagrangeFamily& family, const Region& region,
                                   const LambdaOptions& options) {
  PoisednessEstimate est;
  est.axis_points = options.axis_points ? options.axis_points
                                        : default_axis_points(family.n, options.max_samples);
  const auto grid = region_grid(region, est.axis_points);
  est.samples = grid.size();
  const std::size_t count = options.value_only ? family.p1 : family.size();
  est.argmax = region.center;
  for (const auto& x : grid) {
    for (std::size_t i = 0; i < count; ++i) {
      const double v = std::abs(family.members[i].poly.value(x));
      if (v > est.grid_lambda) {
        est.grid_lambda = v;
        est.argmax = x;
        est.member = i;
      }
    }
  }
  est.lambda = est.grid_lambda;
  if (options.polish_steps > 0 && count > 0) {
    const Vector x = polish(family.members[est.member].poly, region, est.argmax, options.polish_steps);
    const double v = family.max_abs(x, options.value_only);
    if (v > est.lambda) {
      est.lambda = v;
      est.argmax = x;
    }
  }
  return est;
}

std::size_t select_outgoing(const LagrangeFamily& family, const Vector& y_add) {
  std::size_t best = family.p1;
  double best_val = -1.0;
  for (std::size_t i = 0; i < family.p1; ++i) {
    if (i == family.incumbent) continue;
    const double v = std::abs(family.members[i].poly.value(y_add));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == family.p1) throw Error(ErrorCode::EmptySet, "no replaceable point");
  return best;
}

Vector propose_geometry_point(const LagrangeFamily& family, std::size_t index, const Region& region) {
  if (index >= family.size()) throw Error(ErrorCode::IndexOutOfRange, "Lagrange member index");
  const QuadraticModel& l = family.members[index].poly;

  std::vector<Vector> candidates;
  for (const QuadraticModel& m : {l, negated(l)}) {
    candidates.push_back(region.center + solve_subproblem(m, region.center, region.radius, region.bounds));
  }
  const auto grid = region_grid(region, default_axis_points(family.n, 2000));
  candidates.insert(candidates.end(), grid.begin(), grid.end());

  Vector best = region.center;
  double best_val = -1.0;
  for (const auto& c : candidates) {
    const Vector x = region.project(c);
    const double v = std::abs(l.value(x));
    if (v > best_val) {
      best_val = v;
      best = x;
    }
  }
  return region.project(polish(l, region, best, 5));
}

Theorem1Result theorem1_check(const AssembledSystem& interp, const AssembledSystem& augmented,
                              const Region& region, const LambdaOptions& options) {
  const Index r = interp.matrix.rows();
  if (augmented.matrix.rows() < r || augmented.matrix.cols() != interp.matrix.cols() ||
      (augmented.matrix.topRows(r) - interp.matrix).norm() > 1e-12 * std::max(1.0, interp.matrix.norm())) {
    throw Error(ErrorCode::InvalidArgument, "augmented system must extend the interpolation rows");
  }
  LambdaOptions grid_only = options;
  grid_only.polish_steps = 0;
  Theorem1Result out;
  out.lambda_interp = estimate_lambda(lagrange_family(interp), region, grid_only).grid_lambda;
  out.lambda_regress = estimate_lambda(lagrange_family(augmented), region, grid_only).grid_lambda;
  return out;
}

}  // namespace hbobyqa
