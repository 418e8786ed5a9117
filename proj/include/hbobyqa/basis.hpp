#pragma once

#include <cstddef>

#include "hbobyqa/problem.hpp"

namespace hbobyqa {

/// Degree-2 monomial basis {1, x1..xn, x1^2/2, x1x2, .., x1xn, x2^2/2, .., xn^2/2}.
///
/// Rows produced here exclude the constant monomial, so they have length
/// size() - 1. Quadratic columns follow lexicographic (i <= j) order with the
/// 1/2 factor on squared terms.
class MonomialBasis {
 public:
  explicit MonomialBasis(std::size_t n) : n_(n) {}

  std::size_t dimension() const { return n_; }
  /// q1 = (n+1)(n+2)/2, including the constant.
  std::size_t size() const { return (n_ + 1) * (n_ + 2) / 2; }
  std::size_t columns() const { return size() - 1; }

  /// Column of the quadratic monomial for pair (i, j), in a row without the constant.
  std::size_t quadratic_column(int i, int j) const;

  Vector row(const Vector& z) const;
  Vector derivative_row(const Vector& z, int direction) const;
  Vector second_derivative_row(int i, int j) const;

 private:
  std::size_t n_;
};

/// m(x) = c + g'(x - center) + 1/2 (x - center)' H (x - center)
struct QuadraticModel {
  Vector center;
  double c = 0.0;
  Vector g;
  Matrix H;

  static QuadraticModel zero(std::size_t n);

  std::size_t dimension() const { return static_cast<std::size_t>(g.size()); }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

/// Packs (g, H) into the coefficient vector matching MonomialBasis::row.
Vector pack_coefficients(const MonomialBasis& basis, const Vector& g, const Matrix& H);

/// Inverse of pack_coefficients; H comes back symmetric.
void unpack_coefficients(const MonomialBasis& basis, const Vector& v, Vector& g, Matrix& H);

}  // namespace hbobyqa
