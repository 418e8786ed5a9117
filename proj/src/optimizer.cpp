#include "hbobyqa/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hbobyqa/subproblem.hpp"

namespace hbobyqa {

namespace {

using Index = Eigen::Index;

constexpr double kTinyStep = 1e-14;

std::size_t q1_of(std::size_t n) { return (n + 1) * (n + 2) / 2; }

bool is_hermite(SystemKind kind) {
  return kind == SystemKind::HermiteLS || kind == SystemKind::HermiteBobyqa;
}

bool uses_h_prev(SystemKind kind) {
  return kind == SystemKind::MinFrob || kind == SystemKind::HermiteBobyqa;
}

// Quadratic coefficients that no derivative row touches: the gradient
// entries and Hessian entries outside the known directions (and outside the
// known second-order pairs when those rows are used). Value rows alone must
// determine them, so p1 - 1 can never be smaller.
std::size_t value_only_unknowns(std::size_t n, const DerivativeAvailability& av, bool second_order) {
  std::size_t u = n - av.kd();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const int a = static_cast<int>(i);
      const int b = static_cast<int>(j);
      if (av.has_first(a) || av.has_first(b)) continue;
      if (second_order && av.has_second(a, b)) continue;
      ++u;
    }
  }
  return u;
}

std::size_t resolve_p1(const ObjectiveSpec& spec, const SolverConfig& config) {
  return config.p1 ? *config.p1
                   : default_p1(config.kind, spec.dimension, spec.availability, config.second_order);
}

// Rejects p1 values that no system of the configured kind can use.
void check_p1(const ObjectiveSpec& spec, const SolverConfig& config, std::size_t p1) {
  const std::size_t n = spec.dimension;
  const std::size_t q1 = q1_of(n);
  const std::string got = " (p1 = " + std::to_string(p1) + ")";
  switch (config.kind) {
    case SolverKind::FullInterp:
      if (p1 != q1) throw Error(ErrorCode::WrongSetSize, "full interpolation needs p1 = q1" + got);
      break;
    case SolverKind::Bobyqa:
    case SolverKind::HermiteBobyqa:
      if (p1 < n + 2 || p1 > q1) throw Error(ErrorCode::WrongSetSize, "needs n+2 <= p1 <= q1" + got);
      break;
    case SolverKind::HermiteLS: {
      const auto& av = spec.availability;
      std::size_t rows = (p1 - 1) + p1 * av.kd();
      if (config.second_order) rows += p1 * av.second_order().size();
      if (p1 == 0 || rows < q1 - 1 || p1 < 1 + value_only_unknowns(n, av, config.second_order)) {
        throw Error(ErrorCode::Underdetermined, "too few Hermite rows" + got);
      }
      break;
    }
  }
  if (p1 > n * n + n + 1) throw Error(ErrorCode::WrongSetSize, "initial pattern has at most n^2+n+1 points" + got);
}

void record_best(IterationState& state, const EvaluationRecord& rec) {
  if (rec.value < state.f_best) {
    state.f_best = rec.value;
    state.x_best = rec.point;
  }
}

void push_trace(IterationState& state, const EvaluationBudget& budget, bool accepted,
                std::optional<double> model_error) {
  state.trace.rows.push_back({state.k, budget.used(), state.radius, state.f_best, accepted, model_error});
}

Region region_of(const IterationState& state, const Bounds& bounds) {
  return {incumbent(state.ts).point, state.radius, bounds};
}

// Ordered coordinate-cross pattern around x0, at most p1 points.
std::vector<Vector> pattern_points(const Vector& x0, double delta, const Bounds& bounds, std::size_t p1,
                                   const std::vector<int>& known, const std::vector<IndexPair>& known_pairs) {
  const Index n = x0.size();
  const Vector& lo = bounds.lower();
  const Vector& hi = bounds.upper();
  std::vector<Vector> pts{x0};
  const auto add = [&](const Vector& y) {
    if (pts.size() >= p1) return;
    for (const auto& p : pts) {
      if (same_point(p, y)) return;
    }
    pts.push_back(y);
  };
  const auto is_known = [&](Index i) { return std::find(known.begin(), known.end(), i) != known.end(); };
  const auto pair_known = [&](Index i, Index j) {
    return is_known(i) || is_known(j) ||
           std::find(known_pairs.begin(), known_pairs.end(), IndexPair(static_cast<int>(i), static_cast<int>(j))) !=
               known_pairs.end();
  };
  // A coordinate step that would leave the box flips to the other side with
  // twice the length, limited by the room there.
  const auto plus = [&](Index i) {
    Vector y = x0;
    y[i] += hi[i] - x0[i] >= delta ? delta : -std::min(2.0 * delta, x0[i] - lo[i]);
    add(y);
  };
  const auto minus = [&](Index i) {
    Vector y = x0;
    y[i] -= x0[i] - lo[i] >= delta ? delta : -std::min(2.0 * delta, hi[i] - x0[i]);
    add(y);
  };
  const double t = delta / std::sqrt(2.0);
  const auto diagonal = [&](Index i, Index j, double sign) {
    Vector y = x0;
    y[i] += sign * t;
    y[j] += sign * t;
    add(bounds.clip(y));
  };
  // Directions with known derivatives need no second value per axis, so the
  // points that only value rows can supply come first.
  for (Index i = 0; i < n; ++i) plus(i);
  for (Index i = 0; i < n; ++i)
    if (!is_known(i)) minus(i);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (!pair_known(i, j)) diagonal(i, j, 1.0);
  for (Index i = 0; i < n; ++i)
    if (is_known(i)) minus(i);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (pair_known(i, j)) diagonal(i, j, 1.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) diagonal(i, j, -1.0);
  return pts;
}

// Derivative information that reorders the pattern; only the least-squares
// kind has rows that make some pattern points redundant.
std::pair<std::vector<int>, std::vector<IndexPair>> pattern_priority(const ObjectiveSpec& spec,
                                                                     const SolverConfig& config) {
  if (config.kind != SolverKind::HermiteLS) return {};
  return {spec.availability.first_order(),
          config.second_order ? spec.availability.second_order() : std::vector<IndexPair>{}};
}

// Placeholder record used to probe the geometry of a candidate set; values
// do not enter the matrix.
EvaluationRecord probe_record(const Vector& x, double value) {
  EvaluationRecord rec;
  rec.point = x;
  rec.value = value;
  return rec;
}

// Numerical rank and sigma_min / sigma_max over the retained singular values.
std::pair<Index, double> rank_score(const AssembledSystem& sys) {
  if (sys.matrix.cols() == 0) return {0, 1.0};
  const Eigen::JacobiSVD<Matrix> svd(sys.matrix);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return {0, 0.0};
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > 1e-12 * sv[0]) ++rank;
  const double ratio = rank == sys.matrix.cols() ? sv[rank - 1] / sv[0] : 0.0;
  return {rank, ratio};
}

struct GeometryChoice {
  std::size_t out = 0;
  Vector point;
  bool rank_increased = false;
};

// Repair move when the current system is singular and no Lagrange family
// exists: a coordinate or diagonal step from x_opt replaces one point. A point
// outside 2 Delta is always the one replaced, since stale far points dominate
// the scaled matrix. Otherwise the move maximizing (rank, conditioning) wins,
// trying the farthest point first.
GeometryChoice fallback_geometry_point(const IterationState& state, const ObjectiveSpec& spec,
                                       const SolverConfig& config, std::size_t preferred_out) {
  const Incumbent inc = incumbent(state.ts);
  const auto n = static_cast<Index>(spec.dimension);
  const auto& b = spec.bounds;

  std::vector<Vector> coordinate;
  std::vector<Vector> diagonal;
  for (Index i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector y = inc.point;
      y[i] += sign * state.radius;
      coordinate.push_back(b.clip(y));
      for (Index j = i + 1; j < n; ++j) {
        for (double sign2 : {1.0, -1.0}) {
          Vector z = inc.point;
          z[i] += sign * state.radius / std::sqrt(2.0);
          z[j] += sign2 * state.radius / std::sqrt(2.0);
          diagonal.push_back(b.clip(z));
        }
      }
    }
  }

  // A far point goes first and without scoring: the first unused pattern
  // point rebuilds a poised set one evaluation at a time.
  const bool far = (state.ts[preferred_out].point - inc.point).norm() > 2.0 * state.radius;
  if (far) {
    const auto [known, known_pairs] = pattern_priority(spec, config);
    const std::size_t all = static_cast<std::size_t>(1 + 2 * n + n * (n - 1));
    for (const Vector& y : pattern_points(inc.point, state.radius, b, all, known, known_pairs)) {
      if (!same_point(y, inc.point) && !state.ts.contains_point(y, preferred_out)) {
        return {preferred_out, y, true};
      }
    }
  }

  const Index current_rank = rank_score(build_system(state, spec, config)).first;
  std::vector<std::size_t> outs{preferred_out};
  for (std::size_t i = 0; i < state.ts.size() && !far; ++i) {
    if (i != preferred_out && i != inc.index) outs.push_back(i);
  }

  GeometryChoice best;
  std::pair<Index, double> best_score{-1, -1.0};
  for (const auto* pool : {&coordinate, &diagonal}) {
    for (std::size_t out : outs) {
      for (const Vector& y : *pool) {
        if (same_point(y, inc.point) || state.ts.contains_point(y, out)) continue;
        IterationState probe = state;
        EvaluationRecord rec = probe_record(y, inc.value + 1.0);
        // Hermite rows need the derivative keys even though their values are ignored.
        for (int d : spec.availability.first_order()) rec.gradient[d] = 0.0;
        for (const auto& pr : spec.availability.second_order()) rec.hessian[pr] = 0.0;
        probe.ts = replace_point(state.ts, out, rec);
        const auto score = rank_score(build_system(probe, spec, config));
        if (score > best_score) {
          best_score = score;
          best = {out, y};
        }
      }
      if (best_score.first > current_rank) {
        best.rank_increased = true;
        return best;
      }
    }
  }
  if (best.point.size() == 0) throw Error(ErrorCode::DuplicatePoint, "no admissible geometry point");
  best.rank_increased = far;
  return best;
}

void insert_geometry_point(IterationState& state, const ObjectiveSpec& spec, EvaluationBudget& budget,
                           std::size_t out, const Vector& y, std::optional<double> model_error) {
  const EvaluationRecord rec = evaluate(spec, y, budget);
  ++state.k;
  record_best(state, rec);
  state.ts = replace_point(state.ts, out, rec);
  state.geometry_pending = false;
  push_trace(state, budget, false, model_error);
}

void check_radius(IterationState& state, const SolverConfig& config) {
  if (!state.finished && state.radius < config.rho_end) state.finished = TerminationReason::RadiusBelowMin;
}

bool needs_geometry(const IterationState& state, const LagrangeFamily& fam, const Region& region,
                    const SolverConfig& config) {
  const std::size_t far = state.ts.farthest_from_incumbent();
  if ((state.ts[far].point - region.center).norm() > 2.0 * state.radius) return true;
  LambdaOptions opts;
  opts.max_samples = 2000;
  opts.value_only = true;
  return estimate_lambda(fam, region, opts).lambda > config.lambda_threshold;
}

}  // namespace

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::FullInterp: return "FullInterp";
    case SolverKind::Bobyqa: return "Bobyqa";
    case SolverKind::HermiteLS: return "HermiteLS";
    case SolverKind::HermiteBobyqa: return "HermiteBobyqa";
  }
  return "?";
}

std::string_view cli_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::FullInterp: return "full-interp";
    case SolverKind::Bobyqa: return "bobyqa";
    case SolverKind::HermiteLS: return "hermite-ls";
    case SolverKind::HermiteBobyqa: return "hermite-bobyqa";
  }
  return "?";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (SolverKind k : {SolverKind::FullInterp, SolverKind::Bobyqa, SolverKind::HermiteLS,
                       SolverKind::HermiteBobyqa}) {
    if (name == cli_name(k) || name == to_string(k)) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown solver kind '" + std::string(name) + "'");
}

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::RadiusBelowMin: return "RadiusBelowMin";
    case TerminationReason::BudgetExhausted: return "BudgetExhausted";
    case TerminationReason::StepSizeTiny: return "StepSizeTiny";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < 1.0)) throw Error(ErrorCode::InvalidArgument, "need 0 < eta1 < eta2 < 1");
  if (!(0.0 < gamma_dec && gamma_dec < 1.0 && gamma_inc > 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < gamma_dec < 1 < gamma_inc");
  }
  if (!(rho_end > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho_end must be positive");
  if (initial_radius && !(*initial_radius > rho_end)) {
    throw Error(ErrorCode::InvalidArgument, "initial radius must exceed rho_end");
  }
  if (max_radius && initial_radius && *max_radius < *initial_radius) {
    throw Error(ErrorCode::InvalidArgument, "max radius below initial radius");
  }
  if (weighting.enabled && (kind == SolverKind::FullInterp || kind == SolverKind::Bobyqa)) {
    throw Error(ErrorCode::KindMismatch, "weighting applies to Hermite kinds only");
  }
  if (!(diagnostic_delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "diagnostic delta must be positive");
}

std::size_t default_p1(SolverKind kind, std::size_t n, const DerivativeAvailability& availability,
                       bool second_order) {
  const std::size_t q1 = q1_of(n);
  switch (kind) {
    case SolverKind::FullInterp: return q1;
    case SolverKind::Bobyqa:
    case SolverKind::HermiteBobyqa: return std::min(2 * n + 1, q1);
    case SolverKind::HermiteLS: {
      const std::size_t kd = availability.kd();
      std::size_t per_point = 1 + kd;
      if (second_order) per_point += availability.second_order().size();
      const std::size_t by_rows = (q1 + per_point - 1) / per_point;
      const std::size_t floor_pts = 2 * n + 1 > kd ? 2 * n + 1 - kd : 1;
      const std::size_t structural = 1 + value_only_unknowns(n, availability, second_order);
      // Size of the pattern prefix that makes the initial system full rank:
      // x0, +e_i for all i, -e_i for unknown i, one diagonal per unknown pair.
      std::size_t pattern = 1 + n + (n - kd);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const int a = static_cast<int>(i);
          const int b = static_cast<int>(j);
          if (!availability.has_first(a) && !availability.has_first(b) && !(second_order && availability.has_second(a, b))) {
            ++pattern;
          }
        }
      }
      return std::min(std::max({floor_pts, by_rows, structural, pattern}), q1);
    }
  }
  return q1;
}

SystemKind effective_system_kind(SolverKind kind, std::size_t n, std::size_t p1,
                                 const DerivativeAvailability& availability) {
  switch (kind) {
    case SolverKind::FullInterp: return SystemKind::FullInterp;
    case SolverKind::HermiteLS: return SystemKind::HermiteLS;
    case SolverKind::HermiteBobyqa:
      if (availability.kd() > 0) return SystemKind::HermiteBobyqa;
      [[fallthrough]];
    case SolverKind::Bobyqa: return p1 == q1_of(n) ? SystemKind::FullInterp : SystemKind::MinFrob;
  }
  return SystemKind::FullInterp;
}

double default_initial_radius(const Vector& x0, const Bounds& bounds) {
  double delta = 0.1 * std::max(1.0, x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0);
  if (bounds.dimension() > 0) delta = std::min(delta, 0.5 * (bounds.upper() - bounds.lower()).minCoeff());
  return delta;
}

std::vector<Vector> initial_points(const Vector& x0, double delta, const Bounds& bounds, std::size_t p1,
                                   const std::vector<int>& known, const std::vector<IndexPair>& known_pairs) {
  auto pts = pattern_points(x0, delta, bounds, p1, known, known_pairs);
  if (pts.size() < p1) throw Error(ErrorCode::WrongSetSize, "cannot place " + std::to_string(p1) + " initial points");
  return pts;
}

IterationState initialize(const ObjectiveSpec& spec, const Vector& x0, const SolverConfig& config,
                          EvaluationBudget& budget) {
  config.validate();
  if (static_cast<std::size_t>(x0.size()) != spec.dimension || spec.dimension == 0) {
    throw Error(ErrorCode::InvalidArgument, "x0 has wrong dimension");
  }
  if (!spec.bounds.contains(x0)) throw Error(ErrorCode::OutOfBounds, "x0 violates the bounds");
  if (!((spec.bounds.upper() - spec.bounds.lower()).array() > 0.0).all()) {
    throw Error(ErrorCode::InvalidArgument, "every box width must be positive");
  }
  const std::size_t p1 = resolve_p1(spec, config);
  check_p1(spec, config, p1);

  IterationState state;
  const double half_width = 0.5 * (spec.bounds.upper() - spec.bounds.lower()).minCoeff();
  state.radius = std::min(config.initial_radius.value_or(default_initial_radius(x0, spec.bounds)), half_width);
  if (!(state.radius > config.rho_end)) throw Error(ErrorCode::InvalidArgument, "initial radius must exceed rho_end");
  state.max_radius = config.max_radius.value_or(1e3 * state.radius);
  const auto n = static_cast<Index>(spec.dimension);
  state.h_prev = Matrix::Zero(n, n);
  state.f_best = std::numeric_limits<double>::infinity();

  std::vector<EvaluationRecord> records;
  const auto [known, known_pairs] = pattern_priority(spec, config);
  for (const Vector& y : initial_points(x0, state.radius, spec.bounds, p1, known, known_pairs)) {
    records.push_back(evaluate(spec, y, budget));
    record_best(state, records.back());
  }
  state.ts = TrainingSet(std::move(records));
  return state;
}

double ratio_test(double f_old, double f_new, double m_old, double m_new) {
  const double pred = m_old - m_new;
  if (!(pred > 1e-15 * std::max(1.0, std::abs(f_old)))) {
    throw Error(ErrorCode::DegenerateModelDecrease, "predicted decrease " + std::to_string(pred));
  }
  return (f_old - f_new) / pred;
}

AssembledSystem build_system(const IterationState& state, const ObjectiveSpec& spec,
                             const SolverConfig& config) {
  const SystemKind kind =
      effective_system_kind(config.kind, spec.dimension, state.ts.size(), spec.availability);
  AssembledSystem sys;
  switch (kind) {
    case SystemKind::FullInterp: sys = assemble_full_interp(state.ts); break;
    case SystemKind::MinFrob: sys = assemble_min_frob(state.ts, state.h_prev); break;
    case SystemKind::HermiteLS:
      sys = assemble_hermite_ls(state.ts, spec.availability, config.second_order);
      break;
    case SystemKind::HermiteBobyqa:
      sys = assemble_hermite_bobyqa(state.ts, spec.availability, state.h_prev);
      break;
  }
  sys = apply_scaling(sys, state.radius);
  if (config.weighting.enabled && is_hermite(kind)) sys = apply_weighting(sys, config.weighting, state.ts);
  return sys;
}

void step_iteration(IterationState& state, const ObjectiveSpec& spec, const SolverConfig& config,
                    EvaluationBudget& budget) {
  if (state.finished) return;
  if (budget.exhausted()) {
    state.finished = TerminationReason::BudgetExhausted;
    return;
  }
  check_radius(state, config);
  if (state.finished) return;

  const Incumbent inc = incumbent(state.ts);
  const Region region = region_of(state, spec.bounds);

  std::optional<FactorizedSystem> fs;
  QuadraticModel model;
  try {
    fs.emplace(build_system(state, spec, config));
    model = solve_system(*fs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
    const GeometryChoice g = fallback_geometry_point(state, spec, config, state.ts.farthest_from_incumbent());
    insert_geometry_point(state, spec, budget, g.out, g.point, std::nullopt);
    // No swap helped: contract so repeated repairs end at rho_end.
    if (!g.rank_increased) {
      state.radius *= config.gamma_dec;
      check_radius(state, config);
    }
    return;
  }
  const AssembledSystem& sys = fs->system();
  if (uses_h_prev(sys.kind)) state.h_prev = 0.5 * (model.H + model.H.transpose());

  std::optional<double> model_error;
  if (config.taylor) {
    model_error = model_error_diagnostic(model, config.taylor(inc.point), inc.point, config.diagnostic_delta);
  }

  const LagrangeFamily fam = lagrange_family(*fs);
  if (state.geometry_pending) {
    state.geometry_pending = false;
    if (needs_geometry(state, fam, region, config)) {
      const std::size_t out = state.ts.farthest_from_incumbent();
      const Vector y = propose_geometry_point(fam, out, region);
      if (same_point(y, inc.point) || state.ts.contains_point(y, out)) {
        const GeometryChoice g = fallback_geometry_point(state, spec, config, out);
        insert_geometry_point(state, spec, budget, g.out, g.point, model_error);
      } else {
        insert_geometry_point(state, spec, budget, out, y, model_error);
      }
      return;
    }
  }

  const Vector s = solve_subproblem(model, inc.point, state.radius, spec.bounds);
  if (s.norm() < kTinyStep) {
    state.finished = TerminationReason::StepSizeTiny;
    return;
  }
  const Vector trial = spec.bounds.clip(inc.point + s);
  const double m_old = model.value(inc.point);
  const double m_new = model.value(trial);
  if (!(m_old - m_new > 1e-15 * std::max(1.0, std::abs(inc.value))) || state.ts.contains_point(trial)) {
    // No usable model decrease: shrink for free and re-check the geometry.
    state.radius *= config.gamma_dec;
    state.geometry_pending = true;
    check_radius(state, config);
    return;
  }

  const EvaluationRecord rec = evaluate(spec, trial, budget);
  ++state.k;
  record_best(state, rec);
  const double r = ratio_test(inc.value, rec.value, m_old, m_new);
  const bool accepted = r >= config.eta1;
  if (accepted) {
    // The radius follows the step length, so interior steps near a minimizer
    // let the sample set contract with them.
    const double step = s.norm();
    state.radius = r >= config.eta2
                       ? std::min(std::max(config.gamma_dec * state.radius, config.gamma_inc * step), state.max_radius)
                       : std::max(config.gamma_dec * state.radius, step);
    state.ts = replace_point(state.ts, select_outgoing(fam, trial), rec);
  } else {
    state.radius *= config.gamma_dec;
    // A rejected trial never displaces the incumbent.
    if (rec.value >= inc.value) state.ts = replace_point(state.ts, select_outgoing(fam, trial), rec);
  }
  state.geometry_pending = true;
  push_trace(state, budget, accepted, model_error);
  check_radius(state, config);
}

RunResult run(const ObjectiveSpec& spec, const Vector& x0, const SolverConfig& config) {
  config.validate();
  const std::size_t p1 = resolve_p1(spec, config);
  if (config.max_evaluations < p1) {
    throw Error(ErrorCode::InvalidArgument, "budget below the initial set size " + std::to_string(p1));
  }
  EvaluationBudget budget(config.max_evaluations);
  IterationState state = initialize(spec, x0, config, budget);
  while (!state.finished) step_iteration(state, spec, config, budget);

  RunResult out;
  out.x_best = state.x_best;
  out.f_best = state.f_best;
  out.evaluations = budget.used();
  out.iterations = state.k;
  out.reason = *state.finished;
  out.trace = std::move(state.trace);
  return out;
}

double model_error_diagnostic(const QuadraticModel& m, const TaylorData& taylor, const Vector& center,
                              double delta) {
  const auto n = static_cast<std::size_t>(center.size());
  constexpr std::size_t kAxis = 11;
  if (n > 6) throw Error(ErrorCode::InvalidArgument, "diagnostic grid limited to n <= 6");
  const double h = 2.0 * delta / static_cast<double>(kAxis);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= kAxis;

  std::vector<std::size_t> idx(n, 0);
  double sum = 0.0;
  for (std::size_t s = 0; s < total; ++s) {
    Vector d(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      d[static_cast<Index>(i)] = -delta + (static_cast<double>(idx[i]) + 0.5) * h;
    }
    const double t = taylor.value + taylor.gradient.dot(d) + 0.5 * d.dot(taylor.hessian * d);
    const double e = m.value(center + d) - t;
    sum += e * e;
    for (std::size_t i = 0; i < n; ++i) {
      if (++idx[i] < kAxis) break;
      idx[i] = 0;
    }
  }
  return sum * std::pow(h, static_cast<double>(n));
}

}  // namespace hbobyqa
