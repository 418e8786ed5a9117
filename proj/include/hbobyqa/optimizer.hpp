#pragma once

// Trust-region driver for bound-constrained problems with partially known
// derivatives.

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hbobyqa/model_factory.hpp"
#include "hbobyqa/poisedness.hpp"
#include "hbobyqa/problem.hpp"

namespace hbobyqa {

enum class SolverKind { FullInterp, Bobyqa, HermiteLS, HermiteBobyqa };
enum class TerminationReason { RadiusBelowMin, BudgetExhausted, StepSizeTiny };

std::string_view to_string(SolverKind kind);
std::string_view to_string(TerminationReason reason);
/// Accepts "full-interp", "bobyqa", "hermite-ls", "hermite-bobyqa".
SolverKind parse_solver_kind(std::string_view name);
std::string_view cli_name(SolverKind kind);

/// Second-order Taylor data of the true objective at a point.
struct TaylorData {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

struct SolverConfig {
  SolverKind kind = SolverKind::Bobyqa;
  std::optional<std::size_t> p1;
  std::optional<double> initial_radius;  // default 0.1 max(1, |x0|_inf)
  double rho_end = 1e-8;
  double eta1 = 0.1;
  double eta2 = 0.7;
  double gamma_dec = 0.5;
  double gamma_inc = 2.0;
  std::optional<double> max_radius;      // default 1e3 * initial radius
  std::size_t max_evaluations = 1000;
  WeightScheme weighting;
  bool second_order = false;
  double lambda_threshold = 100.0;

  /// When set, every trace row carries the squared L2 distance between the
  /// model and the Taylor expansion at the incumbent over a cube of half-width
  /// diagnostic_delta.
  std::function<TaylorData(const Vector&)> taylor;
  double diagnostic_delta = 0.01;

  void validate() const;
};

struct TraceRow {
  std::size_t iteration = 0;
  std::size_t evaluations = 0;
  double radius = 0.0;
  double f_best = 0.0;
  bool accepted = false;
  std::optional<double> model_error;
};

struct RunTrace {
  std::vector<TraceRow> rows;
};

struct RunResult {
  Vector x_best;
  double f_best = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  TerminationReason reason = TerminationReason::BudgetExhausted;
  RunTrace trace;
};

struct IterationState {
  std::size_t k = 0;
  TrainingSet ts;
  double radius = 0.0;
  double max_radius = 0.0;
  Matrix h_prev;
  bool geometry_pending = false;
  Vector x_best;
  double f_best = 0.0;
  std::optional<TerminationReason> finished;
  RunTrace trace;
};

/// Default number of training points per kind.
std::size_t default_p1(SolverKind kind, std::size_t n, const DerivativeAvailability& availability,
                       bool second_order);

/// Effective system kind after routing (Bobyqa with p1 = q1 becomes full
/// interpolation; Hermite BOBYQA without known derivatives becomes Bobyqa).
SystemKind effective_system_kind(SolverKind kind, std::size_t n, std::size_t p1,
                                 const DerivativeAvailability& availability);

double default_initial_radius(const Vector& x0, const Bounds& bounds);

/// Coordinate-cross starting set, see README for the exact pattern. Steps in
/// `known` directions and diagonals touching them (or listed in known_pairs)
/// are placed after the ones only value rows can supply.
std::vector<Vector> initial_points(const Vector& x0, double delta, const Bounds& bounds, std::size_t p1,
                                   const std::vector<int>& known = {},
                                   const std::vector<IndexPair>& known_pairs = {});

IterationState initialize(const ObjectiveSpec& spec, const Vector& x0, const SolverConfig& config,
                          EvaluationBudget& budget);

/// (f_old - f_new) / (m_old - m_new); throws DegenerateModelDecrease when the
/// predicted decrease is at most 1e-15 max(1, |f_old|).
double ratio_test(double f_old, double f_new, double m_old, double m_new);

/// Builds the (scaled, optionally weighted) system for the current state.
AssembledSystem build_system(const IterationState& state, const ObjectiveSpec& spec,
                             const SolverConfig& config);

/// Advances by one billed evaluation (or a free radius reduction), or sets
/// state.finished.
void step_iteration(IterationState& state, const ObjectiveSpec& spec, const SolverConfig& config,
                    EvaluationBudget& budget);

RunResult run(const ObjectiveSpec& spec, const Vector& x0, const SolverConfig& config);

/// Midpoint rule with 11 points per axis of |m - T|^2 over [c - delta, c + delta]^n.
double model_error_diagnostic(const QuadraticModel& m, const TaylorData& taylor, const Vector& center,
                              double delta);

}  // namespace hbobyqa
