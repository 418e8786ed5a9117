#include "hbobyqa/basis.hpp"

#include <utility>

namespace hbobyqa {

std::size_t MonomialBasis::quadratic_column(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto n = static_cast<std::size_t>(n_);
  const auto a = static_cast<std::size_t>(i);
  const auto b = static_cast<std::size_t>(j);
  // Pairs (k, l >= k) for k < i come first: sum_{k<i} (n - k) of them.
  const std::size_t before = a * n - a * (a - 1) / 2;
  return n + before + (b - a);
}

Vector MonomialBasis::row(const Vector& z) const {
  Vector out(static_cast<Eigen::Index>(columns()));
  const auto n = static_cast<Eigen::Index>(n_);
  out.head(n) = z;
  Eigen::Index col = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    out[col++] = 0.5 * z[i] * z[i];
    for (Eigen::Index j = i + 1; j < n; ++j) out[col++] = z[i] * z[j];
  }
  return out;
}

Vector MonomialBasis::derivative_row(const Vector& z, int direction) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(columns()));
  const auto n = static_cast<Eigen::Index>(n_);
  const Eigen::Index l = direction;
  out[l] = 1.0;
  Eigen::Index col = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == l) out[col] = z[i];
    ++col;
    for (Eigen::Index j = i + 1; j < n; ++j, ++col) {
      if (i == l) out[col] = z[j];
      else if (j == l) out[col] = z[i];
    }
  }
  return out;
}

Vector MonomialBasis::second_derivative_row(int i, int j) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(columns()));
  out[static_cast<Eigen::Index>(quadratic_column(i, j))] = 1.0;
  return out;
}

QuadraticModel QuadraticModel::zero(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return {Vector::Zero(m), 0.0, Vector::Zero(m), Matrix::Zero(m, m)};
}

double QuadraticModel::value(const Vector& x) const {
  const Vector s = x - center;
  return c + g.dot(s) + 0.5 * s.dot(H * s);
}

Vector QuadraticModel::gradient(const Vector& x) const { return g + H * (x - center); }

Vector pack_coefficients(const MonomialBasis& basis, const Vector& g, const Matrix& H) {
  const auto n = static_cast<Eigen::Index>(basis.dimension());
  Vector v(static_cast<Eigen::Index>(basis.columns()));
  v.head(n) = g;
  Eigen::Index col = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) v[col++] = H(i, j);
  }
  return v;
}

void unpack_coefficients(const MonomialBasis& basis, const Vector& v, Vector& g, Matrix& H) {
  const auto n = static_cast<Eigen::Index>(basis.dimension());
  g = v.head(n);
  H.resize(n, n);
  Eigen::Index col = n;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      H(i, j) = v[col];
      H(j, i) = v[col];
      ++col;
    }
  }
}

}  // namespace hbobyqa
