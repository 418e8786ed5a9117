#pragma once

// Experiment plans over problems x solver kinds x derivative masks, with
// deterministic CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hbobyqa/optimizer.hpp"
#include "hbobyqa/testbed.hpp"

namespace hbobyqa {

struct ExperimentPlan {
  std::vector<std::string> problems;
  std::vector<SolverKind> kinds;
  std::vector<std::size_t> kd_values{1};
  /// Explicit 0-based masks; when non-empty they replace kd_values.
  std::vector<std::vector<int>> masks;
  /// Masks per k_d when there are more subsets than this.
  std::size_t permutations = 3;
  std::uint64_t mask_seed = 0;
  NoiseLevel noise = NoiseLevel::None;
  std::vector<std::uint64_t> seeds{0};
  std::size_t budget = 1000;
  bool weighting = false;
  double weighting_s = 5.0;
  bool second_order = false;
};

struct RunSpec {
  std::string problem;
  SolverKind kind = SolverKind::Bobyqa;
  std::vector<int> mask;
  std::uint64_t seed = 0;
  NoiseLevel noise = NoiseLevel::None;
  std::size_t budget = 1000;
  bool weighting = false;
  double weighting_s = 5.0;
  bool second_order = false;
};

struct ResultRow {
  std::string problem;
  std::size_t n = 0;
  std::string kind;
  std::size_t kd = 0;
  std::vector<int> mask;  // 0-based; written 1-based
  std::uint64_t seed = 0;
  std::string noise;
  std::optional<std::size_t> evaluations;  // empty when the run raised
  double f_final = 0.0;                    // noise-free objective at x_final
  double x_error = 0.0;                    // |x_final - x_ref|_2
  bool success = false;
  double f_best = 0.0;  // objective as seen by the solver
  std::size_t iterations = 0;
  std::string reason;   // termination reason or "error:<code>"
  bool second_order = false;
  bool weighting = false;
};

struct SummaryRow {
  std::size_t n = 0;
  std::string kind;
  std::size_t kd = 0;
  std::size_t runs = 0;
  double mean_evaluations = 0.0;
  double success_rate = 0.0;
  std::optional<double> delta_vs_bobyqa_percent;
};

bool is_yield_problem(const std::string& name);
/// Analytic names followed by the three yield variants.
std::vector<std::string> problem_names();
std::size_t problem_dimension(const std::string& name);

/// Resolves every name first (UnknownProblem before any run), then expands in
/// the order problem, mask, kind, seed. Yield problems always use mask {1, 2}.
std::vector<RunSpec> expand_plan(const ExperimentPlan& plan);

/// Masks of size kd in dimension n: all subsets in lexicographic order when
/// there are at most `count`, otherwise `count` distinct seeded draws.
std::vector<std::vector<int>> masks_for(std::size_t n, std::size_t kd, std::size_t count,
                                        std::uint64_t seed);

struct Execution {
  ResultRow row;
  std::optional<RunResult> result;
};

/// Runs one spec; library errors become a row with reason "error:<code>".
/// With diagnostic set, analytic problems record the model error per row.
Execution execute(const RunSpec& spec, bool diagnostic = false);

/// Runs on `workers` threads; rows come back in plan order.
std::vector<ResultRow> run_plan(const ExperimentPlan& plan, std::size_t workers = 1);

/// HBOBYQA_WORKERS if set to a positive integer, else the hardware count.
std::size_t default_workers();

std::string format_double(double v);
std::string format_mask(const std::vector<int>& mask);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Throws MalformedInput.
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Means by (n, kind, k_d), rows that raised excluded. Delta is relative to
/// the Bobyqa group with the same n and k_d.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

void write_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace hbobyqa
