#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "hbobyqa/model_factory.hpp"

using namespace hbobyqa;
using namespace testutil;

namespace {

Vector v(std::initializer_list<double> xs) {
  Vector out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

std::vector<int> all_dirs(std::size_t n) {
  std::vector<int> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(static_cast<int>(i));
  return d;
}

// Interpolation residual of a model on every training point.
double interp_residual(const QuadraticModel& m, const TrainingSet& ts) {
  double worst = 0.0;
  for (const auto& r : ts.records()) worst = std::max(worst, std::abs(m.value(r.point) - r.value));
  return worst;
}

}  // namespace

// ---------------------------------------------------------------- basis rows

TEST(BasisRow, ZeroShift) {
  MonomialBasis b(2);
  EXPECT_EQ(b.row(v({0, 0})), Vector::Zero(5));
}

TEST(BasisRow, HandEvaluatedTwoD) {
  MonomialBasis b(2);
  EXPECT_EQ(b.row(v({1, 2})), v({1, 2, 0.5, 2, 2}));
}

TEST(BasisRow, HandEvaluatedOneD) {
  MonomialBasis b(1);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.row(v({3})), v({3, 4.5}));
}

TEST(BasisRow, QuadraticColumnOrderIsLexicographic) {
  MonomialBasis b(3);
  // x1 x2 x3 | 11 12 13 22 23 33
  EXPECT_EQ(b.quadratic_column(0, 0), 3u);
  EXPECT_EQ(b.quadratic_column(0, 2), 5u);
  EXPECT_EQ(b.quadratic_column(1, 1), 6u);
  EXPECT_EQ(b.quadratic_column(2, 1), 7u);
  EXPECT_EQ(b.quadratic_column(2, 2), 8u);
  EXPECT_EQ(b.columns(), 9u);
}

TEST(BasisDerivativeRow, AtOrigin) {
  MonomialBasis b(2);
  EXPECT_EQ(b.derivative_row(v({0, 0}), 0), v({1, 0, 0, 0, 0}));
}

TEST(BasisDerivativeRow, HandDifferentiated) {
  MonomialBasis b(2);
  EXPECT_EQ(b.derivative_row(v({1, 2}), 0), v({1, 0, 1, 2, 0}));
  EXPECT_EQ(b.derivative_row(v({1, 2}), 1), v({0, 1, 0, 1, 2}));
}

TEST(BasisDerivativeRow, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  for (std::size_t n = 1; n <= 5; ++n) {
    MonomialBasis b(n);
    for (int trial = 0; trial < 20; ++trial) {
      const Vector z = random_point(n, rng, -3.0, 3.0);
      for (int l = 0; l < static_cast<int>(n); ++l) {
        const double h = 1e-5;
        Vector zp = z, zm = z;
        zp[l] += h;
        zm[l] -= h;
        const Vector fd = (b.row(zp) - b.row(zm)) / (2 * h);
        EXPECT_LT((fd - b.derivative_row(z, l)).lpNorm<Eigen::Infinity>(), 1e-8);
      }
    }
  }
}

TEST(BasisSecondDerivativeRow, IdentityOnQuadraticBlock) {
  MonomialBasis b(2);
  EXPECT_EQ(b.second_derivative_row(0, 0), v({0, 0, 1, 0, 0}));
  EXPECT_EQ(b.second_derivative_row(0, 1), v({0, 0, 0, 1, 0}));
  EXPECT_EQ(b.second_derivative_row(1, 0), v({0, 0, 0, 1, 0}));

  // Stacking every pair gives the identity on the quadratic columns.
  for (std::size_t n = 1; n <= 5; ++n) {
    MonomialBasis bn(n);
    const auto nq = static_cast<Eigen::Index>(bn.columns() - n);
    Matrix M(nq, static_cast<Eigen::Index>(bn.columns()));
    Eigen::Index r = 0;
    for (int i = 0; i < static_cast<int>(n); ++i)
      for (int j = i; j < static_cast<int>(n); ++j) M.row(r++) = bn.second_derivative_row(i, j);
    EXPECT_EQ(M.leftCols(static_cast<Eigen::Index>(n)), Matrix::Zero(nq, static_cast<Eigen::Index>(n)));
    EXPECT_EQ(M.rightCols(nq), Matrix::Identity(nq, nq));
  }
}

TEST(BasisSecondDerivativeRow, MatchesFiniteDifferenceOfDerivativeRow) {
  MonomialBasis b(3);
  const Vector z = v({0.4, -1.1, 2.0});
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      Vector zp = z, zm = z;
      zp[j] += 1e-5;
      zm[j] -= 1e-5;
      const Vector fd = (b.derivative_row(zp, i) - b.derivative_row(zm, i)) / 2e-5;
      EXPECT_LT((fd - b.second_derivative_row(i, j)).lpNorm<Eigen::Infinity>(), 1e-8);
    }
  }
}

TEST(PackCoefficients, RoundTrip) {
  std::mt19937_64 rng(2);
  const auto q = random_quadratic(4, rng);
  MonomialBasis b(4);
  Vector g;
  Matrix H;
  unpack_coefficients(b, pack_coefficients(b, q.g, q.H), g, H);
  EXPECT_EQ(g, q.g);
  EXPECT_EQ(H, q.H);
  // Model value agrees with the basis expansion.
  const Vector z = random_point(4, rng);
  EXPECT_NEAR(b.row(z).dot(pack_coefficients(b, q.g, q.H)), q.g.dot(z) + 0.5 * z.dot(q.H * z),
              1e-12);
}

// ---------------------------------------------------------------- model evaluation

TEST(QuadraticModelTest, CenterValueAndGradient) {
  std::mt19937_64 rng(9);
  const auto q = random_quadratic(3, rng);
  QuadraticModel m{random_point(3, rng), 1.5, q.g, q.H};
  EXPECT_DOUBLE_EQ(m.value(m.center), 1.5);
  EXPECT_EQ(m.gradient(m.center), q.g);
}

TEST(QuadraticModelTest, AffineModelHasConstantGradient) {
  QuadraticModel m{v({0, 0}), 0.0, v({1, -2}), Matrix::Zero(2, 2)};
  EXPECT_EQ(m.gradient(v({5, 7})), v({1, -2}));
}

TEST(QuadraticModelTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const auto q = random_quadratic(4, rng);
    QuadraticModel m{random_point(4, rng), 0.3, q.g, q.H};
    const Vector x = random_point(4, rng, -2, 2);
    const Vector grad = m.gradient(x);
    for (int i = 0; i < 4; ++i) {
      Vector xp = x, xm = x;
      xp[i] += 1e-5;
      xm[i] -= 1e-5;
      const double fd = (m.value(xp) - m.value(xm)) / 2e-5;
      EXPECT_LE(std::abs(fd - grad[i]), 1e-8 * std::max(1.0, std::abs(grad[i])));
    }
  }
}

// ---------------------------------------------------------------- full interpolation

TEST(FullInterp, ShapeForTwoD) {
  std::mt19937_64 rng(1);
  const auto q = random_quadratic(2, rng);
  const auto ts = make_set(quadratic_spec(q, {}), random_points(6, 2, rng));
  const auto sys = assemble_full_interp(ts);
  EXPECT_EQ(sys.matrix.rows(), 5);
  EXPECT_EQ(sys.matrix.cols(), 5);
}

TEST(FullInterp, SphereRecoversHessian) {
  Quadratic q;
  q.c = 0;
  q.g = Vector::Zero(2);
  q.H = 2 * Matrix::Identity(2, 2);
  std::mt19937_64 rng(4);
  const auto ts = make_set(quadratic_spec(q, {}), random_points(6, 2, rng));
  const auto m = solve_system(assemble_full_interp(ts));
  EXPECT_LT((m.H - 2 * Matrix::Identity(2, 2)).norm(), 1e-10);
  EXPECT_LT((m.g - 2 * ts.incumbent_record().point).norm(), 1e-10);
  EXPECT_NEAR(m.c, ts.incumbent_record().value, 1e-14);
}

TEST(FullInterp, WrongSetSize) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(5, 2, rng));
  EXPECT_EQ(error_code_of([&] { assemble_full_interp(ts); }), ErrorCode::WrongSetSize);
}

// ---------------------------------------------------------------- min Frobenius

TEST(MinFrob, ShapeForTwoD) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(5, 2, rng));
  const auto sys = assemble_min_frob(ts, Matrix::Zero(2, 2));
  EXPECT_EQ(sys.matrix.rows(), 6);
  EXPECT_EQ(sys.matrix.cols(), 6);
}

TEST(MinFrob, WrongSetSize) {
  std::mt19937_64 rng(1);
  const auto spec = quadratic_spec(random_quadratic(2, rng), {});
  EXPECT_EQ(error_code_of([&] { assemble_min_frob(make_set(spec, random_points(3, 2, rng)), Matrix::Zero(2, 2)); }),
            ErrorCode::WrongSetSize);
  EXPECT_EQ(error_code_of([&] { assemble_min_frob(make_set(spec, random_points(6, 2, rng)), Matrix::Zero(2, 2)); }),
            ErrorCode::WrongSetSize);
}

TEST(MinFrob, ABlockIsSymmetricPositiveSemidefinite) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const auto ts = make_set(quadratic_spec(random_quadratic(n, rng), {}),
                             random_points(2 * n + 1, n, rng));
    const auto sys = assemble_min_frob(ts, Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    const auto p = static_cast<Eigen::Index>(2 * n);
    const Matrix A = sys.matrix.topLeftCorner(p, p);
    EXPECT_EQ(A, A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * std::max(1.0, es.eigenvalues().maxCoeff()));
  }
}

TEST(MinFrob, MatchesKktOracle) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const auto q = random_quadratic(2, rng);
    const auto pts = random_points(5, 2, rng);
    const auto ts = make_set(quadratic_spec(q, {}), pts);
    const Matrix Hp = random_quadratic(2, rng).H;
    const auto m = solve_system(assemble_min_frob(ts, Hp));
    EXPECT_LT(interp_residual(m, ts), 1e-8);

    std::vector<double> vals;
    for (const auto& r : ts.records()) vals.push_back(r.value);
    const auto oracle = min_frob_kkt(pts, vals, ts.incumbent_record().point, Hp);
    EXPECT_LT((m.H - oracle.H).norm(), 1e-6);
    EXPECT_NEAR((m.H - Hp).norm(), (oracle.H - Hp).norm(), 1e-6);
    EXPECT_LT((m.g - oracle.g).norm(), 1e-6);
  }
}

TEST(MinFrob, ExactWithTrueHessianAsPrevious) {
  std::mt19937_64 rng(8);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto q = random_quadratic(n, rng);
    const auto ts = make_set(quadratic_spec(q, {}), random_points(2 * n + 1, n, rng));
    const auto m = solve_system(assemble_min_frob(ts, q.H));
    EXPECT_LT(rel_err(m.H, q.H), 1e-8);
    EXPECT_LT(rel_err(m.g, q.gradient(ts.incumbent_record().point)), 1e-8);
  }
}

// ---------------------------------------------------------------- Hermite least squares

TEST(HermiteLS, SquareHermiteInterpolationShape) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {0, 1}), random_points(2, 2, rng));
  const auto sys = assemble_hermite_ls(ts, DerivativeAvailability(2, {0, 1}), false);
  EXPECT_EQ(sys.matrix.rows(), 5);
  EXPECT_EQ(sys.matrix.cols(), 5);
}

TEST(HermiteLS, RowOrderIsPointMajor) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(3, rng), {0, 2}), random_points(5, 3, rng));
  const auto sys = assemble_hermite_ls(ts, DerivativeAvailability(3, {0, 2}), false);
  ASSERT_EQ(sys.rows.size(), 4u + 10u);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(sys.rows[r].type, RowType::Value);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(sys.rows[4 + 2 * j].point, static_cast<int>(j));
    EXPECT_EQ(sys.rows[4 + 2 * j].i, 0);
    EXPECT_EQ(sys.rows[4 + 2 * j + 1].point, static_cast<int>(j));
    EXPECT_EQ(sys.rows[4 + 2 * j + 1].i, 2);
  }
}

TEST(HermiteLS, DerivativeRowsMatchFiniteDifferencesOfValueRows) {
  std::mt19937_64 rng(6);
  const auto ts = make_set(quadratic_spec(random_quadratic(3, rng), {0, 1, 2}), random_points(4, 3, rng));
  const auto sys = assemble_hermite_ls(ts, DerivativeAvailability(3, {0, 1, 2}), false);
  MonomialBasis b(3);
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    const auto& tag = sys.rows[r];
    if (tag.type != RowType::FirstDerivative) continue;
    const Vector s = ts[static_cast<std::size_t>(tag.point)].point - sys.shift;
    Vector sp = s, sm = s;
    sp[tag.i] += 1e-5;
    sm[tag.i] -= 1e-5;
    const Vector fd = (b.row(sp) - b.row(sm)) / 2e-5;
    EXPECT_LT((fd.transpose() - sys.matrix.row(static_cast<Eigen::Index>(r))).lpNorm<Eigen::Infinity>(), 1e-6);
  }
}

TEST(HermiteLS, OverdeterminedQuadraticIsExact) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto q = random_quadratic(n, rng);
    const auto dirs = all_dirs(n);
    const auto ts = make_set(quadratic_spec(q, dirs), random_points(n + 2, n, rng));
    const auto sys = assemble_hermite_ls(ts, DerivativeAvailability(n, dirs), false);
    ASSERT_GT(sys.matrix.rows(), sys.matrix.cols());
    const auto m = solve_system(sys);
    EXPECT_LT(rel_err(m.H, q.H), 1e-8);
    EXPECT_LT(rel_err(m.g, q.gradient(sys.shift)), 1e-8);
    EXPECT_NEAR(m.c, q.value(sys.shift), 1e-12);
    const FactorizedSystem fs(sys);
    EXPECT_LT(effective_residual(sys, fs.solve_effective(sys.rhs)), 1e-9);
  }
}

TEST(HermiteLS, SecondOrderRowsAppended) {
  std::mt19937_64 rng(13);
  const auto q = random_quadratic(2, rng);
  DerivativeAvailability av(2, {1}, {{1, 1}});
  const auto ts = make_set(quadratic_spec(q, {1}, {{1, 1}}), random_points(4, 2, rng));
  const auto sys = assemble_hermite_ls(ts, av, true);
  EXPECT_EQ(sys.matrix.rows(), 3 + 4 + 4);
  EXPECT_EQ(sys.rows.back().type, RowType::SecondDerivative);
  EXPECT_EQ(sys.rhs[sys.rhs.size() - 1], q.H(1, 1));
  const auto m = solve_system(sys);
  EXPECT_LT(rel_err(m.H, q.H), 1e-8);
  // Without second-order rows the same set is underdetermined-free but smaller.
  EXPECT_EQ(assemble_hermite_ls(ts, av, false).matrix.rows(), 3 + 4);
}

TEST(HermiteLS, UnderdeterminedAndMissingDerivative) {
  std::mt19937_64 rng(1);
  const auto q = random_quadratic(3, rng);
  const auto ts = make_set(quadratic_spec(q, {0}), random_points(4, 3, rng));
  EXPECT_EQ(error_code_of([&] { assemble_hermite_ls(ts, DerivativeAvailability(3, {0}), false); }),
            ErrorCode::Underdetermined);
  const auto ts2 = make_set(quadratic_spec(q, {0}), random_points(6, 3, rng));
  EXPECT_EQ(error_code_of([&] { assemble_hermite_ls(ts2, DerivativeAvailability(3, {0, 1}), false); }),
            ErrorCode::MissingDerivative);
}

TEST(HermiteLS, WithoutDerivativesMatchesFullInterpBitwise) {
  std::mt19937_64 rng(14);
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto ts = make_set(quadratic_spec(random_quadratic(n, rng), {}),
                             random_points((n + 1) * (n + 2) / 2, n, rng));
    const auto a = assemble_full_interp(ts);
    const auto b = assemble_hermite_ls(ts, DerivativeAvailability::none(n), false);
    EXPECT_EQ(a.matrix, b.matrix);
    EXPECT_EQ(a.rhs, b.rhs);
    const auto sa = apply_scaling(a, 0.3);
    const auto sb = apply_scaling(b, 0.3);
    EXPECT_EQ(sa.matrix, sb.matrix);
    EXPECT_EQ(sa.rhs, sb.rhs);
  }
}

// ---------------------------------------------------------------- Hermite BOBYQA

TEST(HermiteBobyqa, ShapeForTwoD) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {0, 1}), random_points(5, 2, rng));
  const auto sys = assemble_hermite_bobyqa(ts, DerivativeAvailability(2, {0, 1}), Matrix::Zero(2, 2));
  EXPECT_EQ(sys.matrix.rows(), 16);
  EXPECT_EQ(sys.matrix.cols(), 6);
}

TEST(HermiteBobyqa, RankOneBlocks) {
  std::mt19937_64 rng(15);
  const auto ts = make_set(quadratic_spec(random_quadratic(3, rng), {0, 1, 2}), random_points(7, 3, rng));
  const auto sys = assemble_hermite_bobyqa(ts, DerivativeAvailability(3, {0, 1, 2}), Matrix::Zero(3, 3));
  const Eigen::Index p = 6;
  for (std::size_t j = 0; j < 7; ++j) {
    const Vector yj = ts[j].point - sys.shift;
    for (Eigen::Index i = 0; i < p; ++i) {
      const Vector& si = sys.shifted[static_cast<std::size_t>(i)];
      const Matrix C = si * si.transpose();
      Eigen::JacobiSVD<Matrix> svd(C);
      svd.setThreshold(1e-12);
      EXPECT_LE(svd.rank(), 1);
      const Vector col = C * yj;
      for (int l = 0; l < 3; ++l) {
        EXPECT_NEAR(sys.matrix(p + 3 + static_cast<Eigen::Index>(j) * 3 + l, i), col[l], 1e-13);
      }
    }
  }
}

TEST(HermiteBobyqa, GradientsMatchOnQuadratic) {
  std::mt19937_64 rng(16);
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto q = random_quadratic(n, rng);
    const auto dirs = all_dirs(n);
    const auto ts = make_set(quadratic_spec(q, dirs), random_points(2 * n + 1, n, rng));
    const auto m = solve_system(assemble_hermite_bobyqa(ts, DerivativeAvailability(n, dirs), q.H));
    for (const auto& r : ts.records()) {
      EXPECT_LT((m.gradient(r.point) - q.gradient(r.point)).norm(), 1e-6);
    }
    EXPECT_LT(rel_err(m.H, q.H), 1e-8);
  }
}

TEST(HermiteBobyqa, TopBlockEqualsMinFrob) {
  std::mt19937_64 rng(17);
  const auto ts = make_set(quadratic_spec(random_quadratic(3, rng), {1}), random_points(7, 3, rng));
  const Matrix Hp = random_quadratic(3, rng).H;
  const auto a = assemble_min_frob(ts, Hp);
  const auto b = assemble_hermite_bobyqa(ts, DerivativeAvailability(3, {1}), Hp);
  EXPECT_EQ(b.matrix.topRows(a.matrix.rows()), a.matrix);
  EXPECT_EQ(b.rhs.head(a.rhs.size()), a.rhs);
}

TEST(HermiteBobyqa, RequiresKnownDerivative) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(5, 2, rng));
  EXPECT_THROW(assemble_hermite_bobyqa(ts, DerivativeAvailability::none(2), Matrix::Zero(2, 2)), Error);
}

// ---------------------------------------------------------------- scaling

TEST(Scaling, UnitRadiusLeavesFullInterpUnchanged) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(6, 2, rng));
  const auto sys = assemble_full_interp(ts);
  const auto s = apply_scaling(sys, 1.0);
  EXPECT_EQ(s.matrix, sys.matrix);
  EXPECT_EQ(s.rhs, sys.rhs);
}

TEST(Scaling, MinFrobDiagonal) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(5, 2, rng));
  const auto s = apply_scaling(assemble_min_frob(ts, Matrix::Zero(2, 2)), 0.5);
  EXPECT_EQ(s.row_scale, v({4, 4, 4, 4, 0.5, 0.5}));
  EXPECT_EQ(s.col_scale, v({4, 4, 4, 4, 0.5, 0.5}));
}

TEST(Scaling, HermiteFactors) {
  std::mt19937_64 rng(1);
  const auto q = random_quadratic(2, rng);
  const auto ts = make_set(quadratic_spec(q, {1}, {{0, 1}}), random_points(5, 2, rng));
  const auto hl = apply_scaling(assemble_hermite_ls(ts, DerivativeAvailability(2, {1}, {{0, 1}}), true), 0.5);
  EXPECT_EQ(hl.col_scale, v({2, 2, 4, 4, 4}));
  EXPECT_EQ(hl.row_scale.head(4), Vector::Ones(4));
  EXPECT_EQ(hl.row_scale.segment(4, 5), Vector::Constant(5, 0.5));
  EXPECT_EQ(hl.row_scale.tail(5), Vector::Constant(5, 0.25));

  const auto hb = apply_scaling(assemble_hermite_bobyqa(ts, DerivativeAvailability(2, {1}), Matrix::Zero(2, 2)), 0.5);
  EXPECT_EQ(hb.row_scale.head(6), v({4, 4, 4, 4, 0.5, 0.5}));
  EXPECT_EQ(hb.row_scale.tail(5), Vector::Constant(5, 2.0));
}

TEST(Scaling, RoundTripLeavesModelInvariant) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
    const auto q = random_quadratic(n, rng);
    const auto dirs = all_dirs(n);
    const double delta = 0.05 + 0.1 * t;
    const auto center = random_point(n, rng);
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < (n + 1) * (n + 2) / 2; ++i) pts.push_back(center + delta * random_point(n, rng));
    const auto spec = quadratic_spec(q, dirs);
    const auto ts = make_set(spec, pts);
    const Matrix Hp = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    std::vector<AssembledSystem> systems = {assemble_full_interp(ts),
                                            assemble_hermite_ls(ts, DerivativeAvailability(n, dirs), false)};
    std::vector<Vector> sub(pts.begin(), pts.begin() + static_cast<long>(2 * n + 1));
    const auto ts2 = make_set(spec, sub);
    systems.push_back(assemble_min_frob(ts2, Hp));
    // The tall Hermite BOBYQA system is only invariant when it is consistent,
    // which holds here with the true Hessian as the previous one.
    systems.push_back(assemble_hermite_bobyqa(ts2, DerivativeAvailability(n, dirs), q.H));
    for (const auto& sys : systems) {
      const auto a = solve_system(sys);
      const auto b = solve_system(apply_scaling(sys, delta));
      EXPECT_LT(rel_err(a.H, b.H), 1e-8) << to_string(sys.kind);
      EXPECT_LT(rel_err(a.g, b.g), 1e-8) << to_string(sys.kind);
    }
  }
}

// ---------------------------------------------------------------- weighting

TEST(Weighting, WeightFormula) {
  EXPECT_DOUBLE_EQ(point_weight(0.0, 2.0, 5.0), 1.0);
  EXPECT_NEAR(point_weight(2.0, 2.0, 5.0), 6.7379e-3, 1e-7);
  EXPECT_NEAR(point_weight(1.0, 2.0, 5.0), std::exp(-2.5), 1e-15);
}

TEST(Weighting, RowsScaledByOwningPoint) {
  std::mt19937_64 rng(19);
  const auto q = random_quadratic(2, rng);
  const auto ts = make_set(quadratic_spec(q, {0}), random_points(5, 2, rng));
  const auto sys = assemble_hermite_ls(ts, DerivativeAvailability(2, {0}), false);
  const auto w = apply_weighting(sys, {true, 5.0}, ts);
  double dmax = 0;
  for (const auto& r : ts.records()) dmax = std::max(dmax, (r.point - sys.shift).norm());
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    const auto pt = static_cast<std::size_t>(sys.rows[r].point);
    const double expected = std::exp(-5.0 * (ts[pt].point - sys.shift).norm() / dmax);
    EXPECT_NEAR(w.row_weight[static_cast<Eigen::Index>(r)], expected, 1e-14);
    EXPECT_LE(w.row_weight[static_cast<Eigen::Index>(r)], 1.0);
    EXPECT_GT(w.row_weight[static_cast<Eigen::Index>(r)], 0.0);
  }
  // Incumbent derivative row carries the maximal weight.
  EXPECT_DOUBLE_EQ(w.row_weight.maxCoeff(), 1.0);
}

TEST(Weighting, EquidistantPointsShareOneWeight) {
  Quadratic q;
  std::vector<Vector> pts = {v({0, 0}), v({1, 0}), v({0, 1}), v({-1, 0}), v({0, -1})};
  q.c = -100;  // value at the origin is the minimum
  q.g = Vector::Zero(2);
  q.H = Matrix::Identity(2, 2);
  const auto ts = make_set(quadratic_spec(q, {1}), pts);
  const auto sys = assemble_hermite_ls(ts, DerivativeAvailability(2, {1}), false);
  const auto w = apply_weighting(sys, {true, 5.0}, ts);
  for (std::size_t r = 0; r < sys.rows.size(); ++r) {
    if (sys.rows[r].point == 0) continue;
    EXPECT_DOUBLE_EQ(w.row_weight[static_cast<Eigen::Index>(r)], std::exp(-5.0));
  }
  // A common factor leaves the solution unchanged.
  const auto a = solve_system(sys);
  const auto b = solve_system(w);
  EXPECT_LT(rel_err(a.H, b.H), 1e-8);
}

TEST(Weighting, HermiteBobyqaTopRowsUnweighted) {
  std::mt19937_64 rng(20);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {0}), random_points(5, 2, rng));
  const auto sys = assemble_hermite_bobyqa(ts, DerivativeAvailability(2, {0}), Matrix::Zero(2, 2));
  const auto w = apply_weighting(sys, {true, 5.0}, ts);
  EXPECT_EQ(w.row_weight.head(6), Vector::Ones(6));
  EXPECT_LT(w.row_weight.tail(5).minCoeff(), 1.0);
}

TEST(Weighting, InterpolationKindsRejected) {
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(6, 2, rng));
  EXPECT_EQ(error_code_of([&] { apply_weighting(assemble_full_interp(ts), {true, 5.0}, ts); }),
            ErrorCode::KindMismatch);
  const auto ts5 = make_set(quadratic_spec(random_quadratic(2, rng), {}), random_points(5, 2, rng));
  EXPECT_EQ(error_code_of([&] { apply_weighting(assemble_min_frob(ts5, Matrix::Zero(2, 2)), {true, 5.0}, ts5); }),
            ErrorCode::KindMismatch);
}

// ---------------------------------------------------------------- solve

TEST(Solve, SquareResidual) {
  std::mt19937_64 rng(22);
  const auto ts = make_set(quadratic_spec(random_quadratic(3, rng), {}), random_points(10, 3, rng));
  const auto sys = assemble_full_interp(ts);
  const FactorizedSystem fs(sys);
  EXPECT_LE(effective_residual(sys, fs.solve_effective(sys.rhs)), 1e-10 * sys.rhs.norm());
}

TEST(Solve, NearDuplicatePointIsRankDeficient) {
  std::mt19937_64 rng(23);
  auto pts = random_points(6, 2, rng);
  pts[5] = pts[4] + Vector::Constant(2, 1e-13);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), pts);
  EXPECT_EQ(error_code_of([&] { solve_system(assemble_full_interp(ts)); }), ErrorCode::RankDeficient);
}

TEST(Solve, CollinearPointsAreRankDeficient) {
  std::vector<Vector> pts;
  for (int i = 0; i < 6; ++i) pts.push_back(v({0.1 * i, 0.2 * i}));
  std::mt19937_64 rng(1);
  const auto ts = make_set(quadratic_spec(random_quadratic(2, rng), {}), pts);
  EXPECT_EQ(error_code_of([&] { solve_system(assemble_full_interp(ts)); }), ErrorCode::RankDeficient);
}

TEST(QuadraticExactness, AllKindsRandom) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 4);
    const auto q = random_quadratic(n, rng);
    const auto dirs = all_dirs(n);
    const auto spec = quadratic_spec(q, dirs);
    const std::size_t q1 = (n + 1) * (n + 2) / 2;
    const Matrix Z = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    const auto tsf = make_set(spec, random_points(q1, n, rng));
    const auto mf = solve_system(apply_scaling(assemble_full_interp(tsf), 0.7));
    EXPECT_LT(rel_err(mf.H, q.H), 1e-8);
    EXPECT_LT(rel_err(mf.g, q.gradient(mf.center)), 1e-8);

    const auto tsh = make_set(spec, random_points(n + 1, n, rng));
    const auto mh = solve_system(apply_scaling(assemble_hermite_ls(tsh, DerivativeAvailability(n, dirs), false), 0.7));
    EXPECT_LT(rel_err(mh.H, q.H), 1e-8);

    const auto tsb = make_set(spec, random_points(2 * n + 1, n, rng));
    const auto mb = solve_system(apply_scaling(assemble_min_frob(tsb, q.H), 0.7));
    EXPECT_LT(rel_err(mb.H, q.H), 1e-8);
    const auto mb0 = solve_system(assemble_min_frob(tsb, Z));
    EXPECT_LT(interp_residual(mb0, tsb), 1e-8);

    const auto mhb = solve_system(apply_scaling(assemble_hermite_bobyqa(tsb, DerivativeAvailability(n, dirs), q.H), 0.7));
    EXPECT_LT(rel_err(mhb.H, q.H), 1e-8);
    EXPECT_LT(rel_err(mhb.g, q.gradient(mhb.center)), 1e-8);
  }
}
