#pragma once

// Shared fixtures for the C++ tests: random quadratics with exact derivatives
// and training sets built from explicit point lists.

#include <Eigen/LU>

#include <random>
#include <vector>

#include "hbobyqa/problem.hpp"

namespace testutil {

using hbobyqa::Matrix;
using hbobyqa::Vector;

struct Quadratic {
  double c = 0.0;
  Vector g;
  Matrix H;

  double value(const Vector& x) const { return c + g.dot(x) + 0.5 * x.dot(H * x); }
  Vector gradient(const Vector& x) const { return g + H * x; }
};

inline Quadratic random_quadratic(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(n);
  Quadratic q;
  q.c = N(rng);
  q.g = Vector(m);
  for (auto i = 0; i < m; ++i) q.g[i] = N(rng);
  Matrix A(m, m);
  for (auto i = 0; i < m; ++i)
    for (auto j = 0; j < m; ++j) A(i, j) = N(rng);
  q.H = A + A.transpose();
  return q;
}

inline Vector random_point(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                           double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Vector x(static_cast<Eigen::Index>(n));
  for (auto i = 0; i < x.size(); ++i) x[i] = U(rng);
  return x;
}

inline hbobyqa::ObjectiveSpec quadratic_spec(const Quadratic& q, std::vector<int> dirs,
                                             std::vector<hbobyqa::IndexPair> pairs = {}) {
  hbobyqa::ObjectiveSpec spec;
  const std::size_t n = static_cast<std::size_t>(q.g.size());
  spec.dimension = n;
  spec.bounds = hbobyqa::Bounds::unbounded(n);
  spec.availability = hbobyqa::DerivativeAvailability(n, std::move(dirs), std::move(pairs));
  spec.value = [q](const Vector& x) { return q.value(x); };
  spec.first_derivative = [q](const Vector& x, int i) { return q.gradient(x)[i]; };
  spec.second_derivative = [q](const Vector&, int i, int j) { return q.H(i, j); };
  return spec;
}

inline hbobyqa::TrainingSet make_set(const hbobyqa::ObjectiveSpec& spec,
                                     const std::vector<Vector>& pts) {
  hbobyqa::EvaluationBudget budget(pts.size());
  std::vector<hbobyqa::EvaluationRecord> recs;
  for (const auto& p : pts) recs.push_back(hbobyqa::evaluate(spec, p, budget));
  return hbobyqa::TrainingSet(std::move(recs));
}

inline std::vector<Vector> random_points(std::size_t count, std::size_t n, std::mt19937_64& rng) {
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back(random_point(n, rng));
  return pts;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

struct DirectModel {
  double c = 0.0;
  Vector g;
  Matrix H;
};

/// Independent oracle for the minimum Frobenius norm update: minimizes
/// |H - H_prev|_F^2 over (c, g, vech H) subject to interpolation at every
/// point, by a dense KKT solve on the vectorized Hessian.
inline DirectModel min_frob_kkt(const std::vector<Vector>& pts, const std::vector<double>& vals,
                                const Vector& center, const Matrix& h_prev) {
  const auto n = center.size();
  const auto nh = n * (n + 1) / 2;
  const auto nz = 1 + n + nh;
  const auto m = static_cast<Eigen::Index>(pts.size());
  Matrix Q = Matrix::Zero(nz, nz);
  Vector zp = Vector::Zero(nz);
  Matrix C = Matrix::Zero(m, nz);
  Vector f(m);
  Eigen::Index k = 1 + n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      Q(k, k) = (i == j) ? 2.0 : 4.0;  // Frobenius counts off-diagonal entries twice
      zp[k] = h_prev(i, j);
    }
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    const Vector s = pts[static_cast<std::size_t>(r)] - center;
    C(r, 0) = 1.0;
    C.block(r, 1, 1, n) = s.transpose();
    Eigen::Index col = 1 + n;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j, ++col) {
        C(r, col) = (i == j) ? 0.5 * s[i] * s[i] : s[i] * s[j];
      }
    }
    f[r] = vals[static_cast<std::size_t>(r)];
  }
  Matrix K = Matrix::Zero(nz + m, nz + m);
  K.topLeftCorner(nz, nz) = Q;
  K.topRightCorner(nz, m) = C.transpose();
  K.bottomLeftCorner(m, nz) = C;
  Vector rhs(nz + m);
  rhs.head(nz) = Q * zp;
  rhs.tail(m) = f;
  const Vector z = K.fullPivLu().solve(rhs);
  DirectModel out;
  out.c = z[0];
  out.g = z.segment(1, n);
  out.H.resize(n, n);
  k = 1 + n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j, ++k) {
      out.H(i, j) = z[k];
      out.H(j, i) = z[k];
    }
  }
  return out;
}

template <class F>
hbobyqa::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const hbobyqa::Error& e) {
    return e.code();
  }
  return static_cast<hbobyqa::ErrorCode>(-1);
}

}  // namespace testutil
