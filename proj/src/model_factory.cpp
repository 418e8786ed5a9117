#include "hbobyqa/model_factory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hbobyqa {

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::FullInterp: return "FullInterp";
    case SystemKind::MinFrob: return "MinFrob";
    case SystemKind::HermiteLS: return "HermiteLS";
    case SystemKind::HermiteBobyqa: return "HermiteBobyqa";
  }
  return "Unknown";
}

namespace {

using Index = Eigen::Index;

// Shared skeleton: incumbent, shift and the ordered non-incumbent points.
AssembledSystem skeleton(const TrainingSet& ts, SystemKind kind) {
  if (ts.empty()) throw Error(ErrorCode::EmptySet, "training set is empty");
  AssembledSystem sys;
  sys.kind = kind;
  sys.n = ts.dimension();
  sys.p1 = ts.size();
  sys.incumbent = ts.incumbent_index();
  sys.shift = ts[sys.incumbent].point;
  sys.f_opt = ts[sys.incumbent].value;
  return sys;
}

void finish(AssembledSystem& sys) {
  const Index rows = sys.matrix.rows();
  sys.row_scale = Vector::Ones(rows);
  sys.row_weight = Vector::Ones(rows);
  sys.col_scale = Vector::Ones(sys.matrix.cols());
}

std::vector<std::size_t> non_incumbent(const TrainingSet& ts) {
  std::vector<std::size_t> idx;
  const std::size_t inc = ts.incumbent_index();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i != inc) idx.push_back(i);
  }
  return idx;
}

// Top (p + n) block of the min-Frobenius system.
void fill_min_frob_block(AssembledSystem& sys, const TrainingSet& ts, const Matrix& h_prev,
                         Index total_rows) {
  const auto n = static_cast<Index>(sys.n);
  const auto others = non_incumbent(ts);
  const auto p = static_cast<Index>(others.size());
  if (h_prev.rows() != n || h_prev.cols() != n) {
    throw Error(ErrorCode::InvalidArgument, "H_prev has wrong shape");
  }
  sys.h_prev = 0.5 * (h_prev + h_prev.transpose());
  sys.matrix = Matrix::Zero(total_rows, p + n);
  sys.rhs = Vector::Zero(total_rows);
  sys.shifted.clear();
  for (auto i : others) sys.shifted.push_back(ts[i].point - sys.shift);

  for (Index i = 0; i < p; ++i) {
    const Vector& si = sys.shifted[static_cast<std::size_t>(i)];
    for (Index j = 0; j < p; ++j) {
      const double d = si.dot(sys.shifted[static_cast<std::size_t>(j)]);
      sys.matrix(i, j) = 0.5 * d * d;
    }
    sys.matrix.block(i, p, 1, n) = si.transpose();
    sys.matrix.block(p, i, n, 1) = si;
    sys.rhs[i] = ts[others[static_cast<std::size_t>(i)]].value - sys.f_opt -
                 0.5 * si.dot(sys.h_prev * si);
    sys.rows.push_back({RowType::Value, static_cast<int>(others[static_cast<std::size_t>(i)]), -1, -1});
  }
  for (Index l = 0; l < n; ++l) sys.rows.push_back({RowType::Constraint, -1, static_cast<int>(l), -1});
}

}  // namespace

AssembledSystem assemble_full_interp(const TrainingSet& ts) {
  AssembledSystem sys = skeleton(ts, SystemKind::FullInterp);
  const MonomialBasis basis(sys.n);
  if (sys.p1 != basis.size()) {
    throw Error(ErrorCode::WrongSetSize, "full interpolation needs " + std::to_string(basis.size()) +
                                             " points, got " + std::to_string(sys.p1));
  }
  const auto cols = static_cast<Index>(basis.columns());
  sys.matrix.resize(cols, cols);
  sys.rhs.resize(cols);
  Index r = 0;
  for (auto i : non_incumbent(ts)) {
    sys.matrix.row(r) = basis.row(ts[i].point - sys.shift).transpose();
    sys.rhs[r] = ts[i].value - sys.f_opt;
    sys.rows.push_back({RowType::Value, static_cast<int>(i), -1, -1});
    ++r;
  }
  finish(sys);
  return sys;
}

AssembledSystem assemble_min_frob(const TrainingSet& ts, const Matrix& h_prev) {
  AssembledSystem sys = skeleton(ts, SystemKind::MinFrob);
  const MonomialBasis basis(sys.n);
  if (sys.p1 < sys.n + 2 || sys.p1 >= basis.size()) {
    throw Error(ErrorCode::WrongSetSize, "min-Frobenius model needs n+2 <= p1 < q1, got p1 = " +
                                             std::to_string(sys.p1));
  }
  const auto total = static_cast<Index>(sys.p1 - 1 + sys.n);
  fill_min_frob_block(sys, ts, h_prev, total);
  finish(sys);
  return sys;
}

AssembledSystem assemble_hermite_ls(const TrainingSet& ts, const DerivativeAvailability& availability,
                                    bool include_second_order) {
  AssembledSystem sys = skeleton(ts, SystemKind::HermiteLS);
  const MonomialBasis basis(sys.n);
  const auto& dirs = availability.first_order();
  static const std::vector<IndexPair> kNoPairs;
  const auto& pairs = include_second_order ? availability.second_order() : kNoPairs;

  const std::size_t rows = sys.p1 - 1 + sys.p1 * dirs.size() + sys.p1 * pairs.size();
  const std::size_t cols = basis.columns();
  if (rows < cols) {
    throw Error(ErrorCode::Underdetermined, std::to_string(rows) + " rows for " +
                                                std::to_string(cols) + " unknowns");
  }
  sys.matrix.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  sys.rhs.resize(static_cast<Index>(rows));

  Index r = 0;
  for (auto i : non_incumbent(ts)) {
    sys.matrix.row(r) = basis.row(ts[i].point - sys.shift).transpose();
    sys.rhs[r] = ts[i].value - sys.f_opt;
    sys.rows.push_back({RowType::Value, static_cast<int>(i), -1, -1});
    ++r;
  }
  for (std::size_t j = 0; j < sys.p1; ++j) {
    const Vector s = ts[j].point - sys.shift;
    for (int l : dirs) {
      sys.matrix.row(r) = basis.derivative_row(s, l).transpose();
      sys.rhs[r] = ts[j].gradient_entry(l);
      sys.rows.push_back({RowType::FirstDerivative, static_cast<int>(j), l, -1});
      ++r;
    }
  }
  for (std::size_t j = 0; j < sys.p1; ++j) {
    for (const auto& [a, b] : pairs) {
      sys.matrix.row(r) = basis.second_derivative_row(a, b).transpose();
      sys.rhs[r] = ts[j].hessian_entry(a, b);
      sys.rows.push_back({RowType::SecondDerivative, static_cast<int>(j), a, b});
      ++r;
    }
  }
  finish(sys);
  return sys;
}

AssembledSystem assemble_hermite_bobyqa(const TrainingSet& ts,
                                        const DerivativeAvailability& availability,
                                        const Matrix& h_prev) {
  AssembledSystem sys = skeleton(ts, SystemKind::HermiteBobyqa);
  const auto& dirs = availability.first_order();
  if (dirs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "Hermite BOBYQA needs at least one known derivative");
  }
  if (sys.p1 < sys.n + 2) {
    throw Error(ErrorCode::WrongSetSize, "Hermite BOBYQA needs p1 >= n+2");
  }
  const auto n = static_cast<Index>(sys.n);
  const auto p = static_cast<Index>(sys.p1 - 1);
  const auto total = static_cast<Index>(sys.p1 - 1 + sys.n + sys.p1 * dirs.size());
  fill_min_frob_block(sys, ts, h_prev, total);

  Index r = p + n;
  for (std::size_t j = 0; j < sys.p1; ++j) {
    const Vector sj = ts[j].point - sys.shift;
    const Vector hs = sys.h_prev * sj;
    for (int l : dirs) {
      // (C^i s_j)_l = s_i[l] * (s_i' s_j)
      for (Index i = 0; i < p; ++i) {
        const Vector& si = sys.shifted[static_cast<std::size_t>(i)];
        sys.matrix(r, i) = si[l] * si.dot(sj);
      }
      sys.matrix(r, p + l) = 1.0;
      sys.rhs[r] = ts[j].gradient_entry(l) - hs[l];
      sys.rows.push_back({RowType::FirstDerivative, static_cast<int>(j), l, -1});
      ++r;
    }
  }
  finish(sys);
  return sys;
}

AssembledSystem apply_scaling(const AssembledSystem& sys, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "scaling radius must be positive");
  const Index rows = sys.matrix.rows();
  const Index cols = sys.matrix.cols();
  const auto n = static_cast<Index>(sys.n);
  Vector L = Vector::Ones(rows);
  Vector R = Vector::Ones(cols);

  switch (sys.kind) {
    case SystemKind::FullInterp:
    case SystemKind::HermiteLS:
      R.head(n).setConstant(1.0 / delta);
      R.tail(cols - n).setConstant(1.0 / (delta * delta));
      for (Index r = 0; r < rows; ++r) {
        const RowType t = sys.rows[static_cast<std::size_t>(r)].type;
        if (t == RowType::FirstDerivative) L[r] = delta;
        else if (t == RowType::SecondDerivative) L[r] = delta * delta;
      }
      break;
    case SystemKind::MinFrob:
    case SystemKind::HermiteBobyqa: {
      const Index p = cols - n;
      R.head(p).setConstant(1.0 / (delta * delta));
      R.tail(n).setConstant(delta);
      L.head(p).setConstant(1.0 / (delta * delta));
      L.segment(p, n).setConstant(delta);
      if (rows > p + n) L.tail(rows - p - n).setConstant(1.0 / delta);
      break;
    }
  }

  AssembledSystem out = sys;
  out.matrix = L.asDiagonal() * sys.matrix * R.asDiagonal();
  out.rhs = L.cwiseProduct(sys.rhs);
  out.row_scale = sys.row_scale.cwiseProduct(L);
  out.col_scale = sys.col_scale.cwiseProduct(R);
  out.radius = delta;
  return out;
}

double point_weight(double distance, double max_distance, double s) {
  if (max_distance <= 0.0) return 1.0;
  return std::exp(s - s * distance / max_distance) / std::exp(s);
}

AssembledSystem apply_weighting(const AssembledSystem& sys, const WeightScheme& scheme,
                                const TrainingSet& ts) {
  if (sys.kind != SystemKind::HermiteLS && sys.kind != SystemKind::HermiteBobyqa) {
    throw Error(ErrorCode::KindMismatch, "weighting applies to Hermite regression systems only");
  }
  if (!scheme.enabled) return sys;

  std::vector<double> dist(ts.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    dist[i] = (ts[i].point - sys.shift).norm();
    dmax = std::max(dmax, dist[i]);
  }
  const Index rows = sys.matrix.rows();
  Vector D = Vector::Ones(rows);
  const Index fixed = sys.kind == SystemKind::HermiteBobyqa
                          ? static_cast<Index>(sys.p1 - 1 + sys.n)
                          : 0;
  for (Index r = fixed; r < rows; ++r) {
    const int pt = sys.rows[static_cast<std::size_t>(r)].point;
    if (pt >= 0) D[r] = point_weight(dist[static_cast<std::size_t>(pt)], dmax, scheme.s);
  }

  AssembledSystem out = sys;
  out.matrix = D.asDiagonal() * sys.matrix;
  out.rhs = D.cwiseProduct(sys.rhs);
  out.row_weight = sys.row_weight.cwiseProduct(D);
  return out;
}

FactorizedSystem::FactorizedSystem(const AssembledSystem& sys) : sys_(sys) {
  if (sys.matrix.cols() == 0) return;  // constant-only model: nothing to solve
  svd_.compute(sys.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd_.setThreshold(1e-12);
  if (svd_.rank() < sys.matrix.cols()) {
    throw Error(ErrorCode::RankDeficient, "model system has numerical rank " +
                                              std::to_string(svd_.rank()) + " < " +
                                              std::to_string(sys.matrix.cols()));
  }
}

Vector FactorizedSystem::solve_effective(const Vector& rhs) const {
  if (sys_.matrix.cols() == 0) return Vector(0);
  const Vector u = svd_.solve(rhs);
  return sys_.col_scale.cwiseProduct(u);
}

Vector FactorizedSystem::solve_raw(const Vector& raw_rhs) const {
  return solve_effective(sys_.row_scale.cwiseProduct(sys_.row_weight).cwiseProduct(raw_rhs));
}

double FactorizedSystem::inverse_condition() const {
  if (sys_.matrix.cols() == 0) return 1.0;
  const auto& sv = svd_.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0.0;
  return sv[sv.size() - 1] / sv[0];
}

QuadraticModel recover_model(const AssembledSystem& sys, const Vector& v, double c,
                             const Matrix& h_base) {
  const auto n = static_cast<Index>(sys.n);
  QuadraticModel m;
  m.center = sys.shift;
  m.c = c;
  switch (sys.kind) {
    case SystemKind::FullInterp:
    case SystemKind::HermiteLS:
      unpack_coefficients(MonomialBasis(sys.n), v, m.g, m.H);
      break;
    case SystemKind::MinFrob:
    case SystemKind::HermiteBobyqa: {
      const auto p = static_cast<Index>(sys.shifted.size());
      m.H = h_base;
      for (Index i = 0; i < p; ++i) {
        const Vector& s = sys.shifted[static_cast<std::size_t>(i)];
        m.H.noalias() += v[i] * (s * s.transpose());
      }
      m.g = v.segment(p, n);
      break;
    }
  }
  m.H = 0.5 * (m.H + m.H.transpose());
  return m;
}

QuadraticModel solve_system(const AssembledSystem& sys) { return solve_system(FactorizedSystem(sys)); }

QuadraticModel solve_system(const FactorizedSystem& fs) {
  const AssembledSystem& sys = fs.system();
  const Vector v = fs.solve_effective(sys.rhs);
  const Matrix base = sys.h_prev.size() ? sys.h_prev : Matrix::Zero(static_cast<Index>(sys.n),
                                                                     static_cast<Index>(sys.n));
  return recover_model(sys, v, sys.f_opt, base);
}

double effective_residual(const AssembledSystem& sys, const Vector& v) {
  const Vector u = v.cwiseQuotient(sys.col_scale);
  return (sys.matrix * u - sys.rhs).norm();
}

}  // namespace hbobyqa
