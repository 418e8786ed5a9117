#include "hbobyqa/subproblem.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hbobyqa {

namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest alpha >= 0 with |a + alpha p| <= delta, assuming |a| <= delta.
double ball_step(const Vector& a, const Vector& p, double delta) {
  const double pp = p.squaredNorm();
  if (pp == 0.0) return kInf;
  const double ap = a.dot(p);
  const double room = std::max(0.0, delta * delta - a.squaredNorm());
  return (-ap + std::sqrt(ap * ap + pp * room)) / pp;
}

// Largest alpha >= 0 keeping x + alpha p in the box; `hit` receives the blocking index.
double box_step(const Vector& x, const Vector& p, const Bounds& b, const std::vector<bool>& free,
                Index& hit) {
  double best = kInf;
  hit = -1;
  for (Index i = 0; i < x.size(); ++i) {
    if (!free[static_cast<std::size_t>(i)] || p[i] == 0.0) continue;
    const double room = p[i] > 0 ? (b.upper()[i] - x[i]) / p[i] : (b.lower()[i] - x[i]) / p[i];
    const double a = std::max(0.0, room);
    if (a < best) {
      best = a;
      hit = i;
    }
  }
  return best;
}

bool at_lower(const Vector& x, const Bounds& b, Index i) { return x[i] <= b.lower()[i]; }
bool at_upper(const Vector& x, const Bounds& b, Index i) { return x[i] >= b.upper()[i]; }

// Generalized Cauchy point along the projected path x(t) = P(center - t g),
// truncated at the trust-region sphere.
Vector cauchy_point(const QuadraticModel& m, const Vector& center, double delta, const Bounds& b) {
  const Index n = center.size();
  Vector x = center;
  Vector d = -m.gradient(center);
  for (Index i = 0; i < n; ++i) {
    if ((d[i] < 0 && at_lower(x, b, i)) || (d[i] > 0 && at_upper(x, b, i))) d[i] = 0.0;
  }
  std::vector<bool> free(static_cast<std::size_t>(n), true);
  for (Index iter = 0; iter <= n; ++iter) {
    if (d.squaredNorm() == 0.0) break;
    const double slope = m.gradient(x).dot(d);
    if (slope >= 0.0) break;
    const double curv = d.dot(m.H * d);
    Index hit = -1;
    const double t_box = box_step(x, d, b, free, hit);
    const double t_ball = ball_step(x - center, d, delta);
    const double t_max = std::min(t_box, t_ball);
    if (curv > 0.0 && -slope / curv < t_max) {
      x += (-slope / curv) * d;
      break;
    }
    if (!std::isfinite(t_max)) break;  // unbounded descent cannot happen inside a ball
    x += t_max * d;
    if (t_ball <= t_box) break;
    // Fix every coordinate that reached its bound at this breakpoint.
    for (Index i = 0; i < n; ++i) {
      if (d[i] != 0.0 && ((d[i] < 0 && x[i] <= b.lower()[i] + 1e-15 * std::max(1.0, std::abs(x[i]))) ||
                          (d[i] > 0 && x[i] >= b.upper()[i] - 1e-15 * std::max(1.0, std::abs(x[i]))))) {
        d[i] = 0.0;
        free[static_cast<std::size_t>(i)] = false;
      }
    }
    if (hit >= 0) {
      d[hit] = 0.0;
      free[static_cast<std::size_t>(hit)] = false;
    }
    x = b.clip(x);
  }
  return b.clip(x);
}

// Truncated CG from x0 on the free variables; variables hitting the box are
// fixed and the iteration restarts from the current point.
Vector truncated_cg(const QuadraticModel& m, const Vector& center, double delta, const Bounds& b,
                    const Vector& x0) {
  const Index n = center.size();
  Vector x = x0;
  std::vector<bool> free(static_cast<std::size_t>(n), true);
  {
    const Vector grad = m.gradient(x);
    for (Index i = 0; i < n; ++i) {
      if ((at_lower(x, b, i) && grad[i] >= 0) || (at_upper(x, b, i) && grad[i] <= 0)) {
        free[static_cast<std::size_t>(i)] = false;
      }
    }
  }
  const double gscale = std::max(1.0, m.g.norm());
  const auto mask = [&](Vector v) {
    for (Index i = 0; i < n; ++i) {
      if (!free[static_cast<std::size_t>(i)]) v[i] = 0.0;
    }
    return v;
  };

  for (Index restart = 0; restart <= n; ++restart) {
    Vector r = mask(m.gradient(x));
    if (r.norm() <= 1e-12 * gscale) return x;
    Vector p = -r;
    bool restart_needed = false;
    for (Index k = 0; k < n; ++k) {
      const Vector Hp = mask(m.H * p);
      const double curv = p.dot(Hp);
      Index hit = -1;
      const double a_box = box_step(x, p, b, free, hit);
      const double a_ball = ball_step(x - center, p, delta);
      const double a_lim = std::min(a_box, a_ball);
      const double rr = r.squaredNorm();
      if (curv <= 0.0 || rr / curv >= a_lim) {
        if (!std::isfinite(a_lim)) return x;
        x = b.clip(x + a_lim * p);
        if (a_box < a_ball && hit >= 0) {
          free[static_cast<std::size_t>(hit)] = false;
          x[hit] = p[hit] > 0 ? b.upper()[hit] : b.lower()[hit];
          restart_needed = true;
          break;
        }
        return x;
      }
      const double alpha = rr / curv;
      x += alpha * p;
      r += alpha * Hp;
      if (r.norm() <= 1e-12 * gscale) return b.clip(x);
      const double beta = r.squaredNorm() / rr;
      p = -r + beta * p;
    }
    if (!restart_needed) {
      // Lost conjugacy after n steps; restart from the current point.
      if (mask(m.gradient(x)).norm() <= 1e-10 * gscale) return b.clip(x);
    }
  }
  return b.clip(x);
}

// Steps of maximal feasible length along +-v for the most negative
// eigenvector v of H; empty when H is positive semidefinite.
std::vector<Vector> negative_curvature_points(const QuadraticModel& m, const Vector& center,
                                              double delta, const Bounds& b) {
  std::vector<Vector> out;
  if (m.H.size() == 0) return out;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m.H);
  if (es.eigenvalues()[0] >= 0.0) return out;
  const Vector v = es.eigenvectors().col(0);
  std::vector<bool> free(static_cast<std::size_t>(center.size()), true);
  for (double sign : {1.0, -1.0}) {
    const Vector p = sign * v;
    Index hit = -1;
    const double a = std::min(box_step(center, p, b, free, hit), ball_step(Vector::Zero(center.size()), p, delta));
    if (a > 0.0 && std::isfinite(a)) out.push_back(b.clip(center + a * p));
  }
  return out;
}

}  // namespace

Vector projected_gradient(const QuadraticModel& m, const Vector& center, const Bounds& bounds) {
  Vector g = m.gradient(center);
  for (Index i = 0; i < g.size(); ++i) {
    if ((g[i] > 0 && at_lower(center, bounds, i)) || (g[i] < 0 && at_upper(center, bounds, i))) g[i] = 0.0;
  }
  return g;
}

double cauchy_decrease_bound(const QuadraticModel& m, const Vector& center, double delta,
                             const Bounds& bounds) {
  const double gp = projected_gradient(m, center, bounds).norm();
  const double hnorm = m.H.size() ? Eigen::SelfAdjointEigenSolver<Matrix>(m.H, Eigen::EigenvaluesOnly)
                                        .eigenvalues()
                                        .cwiseAbs()
                                        .maxCoeff()
                                  : 0.0;
  return 0.5 * gp * std::min(delta, gp / (1.0 + hnorm));
}

Vector solve_subproblem(const QuadraticModel& m, const Vector& center, double delta,
                        const Bounds& bounds) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "trust radius must be positive");
  const Vector gcp = cauchy_point(m, center, delta, bounds);
  Vector best = gcp;
  const auto consider = [&](const Vector& x) {
    if (m.value(x) < m.value(best)) best = x;
  };
  consider(truncated_cg(m, center, delta, bounds, gcp));
  for (const Vector& x : negative_curvature_points(m, center, delta, bounds)) {
    consider(x);
    consider(truncated_cg(m, center, delta, bounds, x));
  }
  // Guard the ball against rounding.
  Vector s = best - center;
  const double norm = s.norm();
  if (norm > delta) s *= delta / norm;
  return bounds.clip(center + s) - center;
}

}  // namespace hbobyqa
