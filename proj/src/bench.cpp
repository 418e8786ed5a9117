#include "hbobyqa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "hbobyqa/yield.hpp"

namespace hbobyqa {

namespace {

constexpr const char* kResultsHeader =
    "problem,n,kind,k_d,mask,seed,noise,evaluations,f_final,x_error,success,f_best,iterations,reason,"
    "second_order,weighting";
constexpr const char* kSummaryHeader = "n,kind,k_d,runs,mean_evaluations,success_rate,delta_vs_bobyqa_percent";
constexpr const char* kTraceHeader = "iteration,evaluations,radius,f_best,accepted,model_error";

YieldNoise yield_mode(const std::string& name) {
  if (name == "yield-nonoise") return YieldNoise::NoNoise;
  if (name == "yield-lownoise") return YieldNoise::LowNoise;
  return YieldNoise::HighNoise;
}

NoiseLevel yield_noise_level(YieldNoise mode) {
  switch (mode) {
    case YieldNoise::NoNoise: return NoiseLevel::None;
    case YieldNoise::LowNoise: return NoiseLevel::Low;
    case YieldNoise::HighNoise: return NoiseLevel::High;
  }
  return NoiseLevel::None;
}

bool uses_weighting(SolverKind kind) {
  return kind == SolverKind::HermiteLS || kind == SolverKind::HermiteBobyqa;
}

std::vector<IndexPair> pairs_within(const std::vector<int>& mask) {
  std::vector<IndexPair> out;
  for (std::size_t a = 0; a < mask.size(); ++a)
    for (std::size_t b = a; b < mask.size(); ++b) out.emplace_back(mask[a], mask[b]);
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedInput, "line " + std::to_string(line) + ": " + what);
}

std::uint64_t parse_unsigned(const std::string& s, std::size_t line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) malformed(line, "bad integer '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    malformed(line, "bad integer '" + s + "'");
  }
}

double parse_double(const std::string& s, std::size_t line) {
  if (s.empty()) malformed(line, "empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) malformed(line, "bad number '" + s + "'");
  return v;
}

bool parse_flag(const std::string& s, std::size_t line) {
  if (s == "0") return false;
  if (s == "1") return true;
  malformed(line, "bad flag '" + s + "'");
}

std::vector<int> parse_mask(const std::string& s, std::size_t line) {
  std::vector<int> mask;
  if (s.empty()) return mask;
  for (const auto& part : split(s, ';')) {
    const auto v = parse_unsigned(part, line);
    if (v == 0) malformed(line, "mask indices are 1-based");
    mask.push_back(static_cast<int>(v) - 1);
  }
  return mask;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

bool is_yield_problem(const std::string& name) {
  return name == "yield-nonoise" || name == "yield-lownoise" || name == "yield-highnoise";
}

std::vector<std::string> problem_names() {
  auto names = analytic_problem_names();
  names.insert(names.end(), {"yield-nonoise", "yield-lownoise", "yield-highnoise"});
  return names;
}

std::size_t problem_dimension(const std::string& name) {
  if (is_yield_problem(name)) return 4;
  return make_problem(name).dimension;
}

std::vector<std::vector<int>> masks_for(std::size_t n, std::size_t kd, std::size_t count, std::uint64_t seed) {
  if (kd > n) return {};
  std::vector<std::vector<int>> out;
  if (binomial(n, kd) <= static_cast<double>(count)) {
    // Lexicographic enumeration via a selection bitmap.
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(kd), true);
    do {
      std::vector<int> m;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) m.push_back(static_cast<int>(i));
      out.push_back(std::move(m));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
  }
  std::seed_seq seq{seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(kd)};
  std::mt19937_64 rng(seq);
  std::vector<int> order(n);
  while (out.size() < count) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> m(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kd));
    std::sort(m.begin(), m.end());
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
  }
  return out;
}

std::vector<RunSpec> expand_plan(const ExperimentPlan& plan) {
  std::vector<std::size_t> dims;
  for (const auto& name : plan.problems) dims.push_back(problem_dimension(name));
  for (const auto& mask : plan.masks) {
    for (std::size_t p = 0; p < plan.problems.size(); ++p) {
      if (is_yield_problem(plan.problems[p])) continue;
      for (int i : mask) {
        if (i < 0 || static_cast<std::size_t>(i) >= dims[p]) {
          throw Error(ErrorCode::InvalidArgument,
                      "mask index " + std::to_string(i + 1) + " exceeds dimension of " + plan.problems[p]);
        }
      }
    }
  }

  std::vector<RunSpec> out;
  for (std::size_t p = 0; p < plan.problems.size(); ++p) {
    const auto& name = plan.problems[p];
    std::vector<std::vector<int>> masks;
    if (is_yield_problem(name)) {
      masks = {{0, 1}};
    } else if (!plan.masks.empty()) {
      masks = plan.masks;
    } else {
      for (std::size_t kd : plan.kd_values) {
        for (auto& m : masks_for(dims[p], kd, plan.permutations, plan.mask_seed)) masks.push_back(std::move(m));
      }
    }
    for (const auto& mask : masks) {
      for (SolverKind kind : plan.kinds) {
        for (std::uint64_t seed : plan.seeds) {
          RunSpec rs;
          rs.problem = name;
          rs.kind = kind;
          rs.mask = mask;
          rs.seed = seed;
          rs.noise = plan.noise;
          rs.budget = plan.budget;
          rs.weighting = plan.weighting && uses_weighting(kind);
          rs.weighting_s = plan.weighting_s;
          rs.second_order = plan.second_order;
          out.push_back(std::move(rs));
        }
      }
    }
  }
  return out;
}

Execution execute(const RunSpec& rs, bool diagnostic) {
  Execution ex;
  ResultRow& row = ex.row;
  row.problem = rs.problem;
  row.kind = std::string(cli_name(rs.kind));
  row.mask = rs.mask;
  std::sort(row.mask.begin(), row.mask.end());
  row.kd = row.mask.size();
  row.seed = rs.seed;
  row.noise = to_string(rs.noise);
  row.second_order = rs.second_order;
  row.weighting = rs.weighting;

  try {
    ObjectiveSpec spec;
    Vector x0, x_ref;
    double f_ref = 0.0;
    std::function<double(const Vector&)> truth;
    SolverConfig config;
    if (is_yield_problem(rs.problem)) {
      const YieldNoise mode = yield_mode(rs.problem);
      row.noise = to_string(yield_noise_level(mode));
      row.mask = {0, 1};
      row.kd = 2;
      row.n = 4;
      spec = yield_objective(mode, rs.seed);
      x0 = yield_start();
      x_ref = Vector{{9.9, 5.6, 1.5, 0.5}};
      f_ref = -exact_surrogate_yield(x_ref);
      truth = [](const Vector& x) { return -exact_surrogate_yield(x); };
    } else {
      const TestProblem problem = make_problem(rs.problem);
      row.n = problem.dimension;
      const auto pairs = rs.second_order ? pairs_within(row.mask) : std::vector<IndexPair>{};
      spec = add_noise(mask_availability(problem, row.mask, pairs), noise_amplitude(rs.noise), rs.seed);
      x0 = problem.x0;
      x_ref = problem.x_opt;
      f_ref = problem.f_opt;
      truth = problem.value;
      if (diagnostic && problem.dimension <= 6) {
        config.taylor = [problem](const Vector& x) { return problem.taylor(x); };
      }
    }
    config.kind = rs.kind;
    config.max_evaluations = rs.budget;
    config.second_order = rs.second_order;
    config.weighting.enabled = rs.weighting;
    config.weighting.s = rs.weighting_s;

    RunResult result = run(spec, x0, config);
    row.evaluations = result.evaluations;
    row.f_final = truth(result.x_best);
    row.x_error = (result.x_best - x_ref).norm();
    row.success = row.f_final <= f_ref + 1e-6 * std::max(1.0, std::abs(f_ref));
    row.f_best = result.f_best;
    row.iterations = result.iterations;
    row.reason = std::string(to_string(result.reason));
    ex.result = std::move(result);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownProblem) throw;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.evaluations.reset();
    row.f_final = row.x_error = row.f_best = nan;
    row.success = false;
    row.iterations = 0;
    row.reason = "error:" + std::string(to_string(e.code()));
  }
  return ex;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("HBOBYQA_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_plan(const ExperimentPlan& plan, std::size_t workers) {
  const auto specs = expand_plan(plan);
  std::vector<ResultRow> rows(specs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        rows[i] = execute(specs[i]).row;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t count = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(specs.size(), 1));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < count; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_mask(const std::vector<int>& mask) {
  std::string out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(mask[i] + 1);
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.problem << ',' << r.n << ',' << r.kind << ',' << r.kd << ',' << format_mask(r.mask) << ',' << r.seed
        << ',' << r.noise << ',' << (r.evaluations ? std::to_string(*r.evaluations) : std::string()) << ','
        << format_double(r.f_final) << ',' << format_double(r.x_error) << ',' << (r.success ? 1 : 0) << ','
        << format_double(r.f_best) << ',' << r.iterations << ',' << r.reason << ',' << (r.second_order ? 1 : 0)
        << ',' << (r.weighting ? 1 : 0) << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) malformed(1, "unexpected header");
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 16) malformed(lineno, "expected 16 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.problem = f[0];
    r.n = parse_unsigned(f[1], lineno);
    r.kind = f[2];
    try {
      parse_solver_kind(r.kind);
    } catch (const Error&) {
      malformed(lineno, "unknown kind '" + r.kind + "'");
    }
    r.kd = parse_unsigned(f[3], lineno);
    r.mask = parse_mask(f[4], lineno);
    if (r.mask.size() != r.kd) malformed(lineno, "mask size differs from k_d");
    r.seed = parse_unsigned(f[5], lineno);
    r.noise = f[6];
    if (!f[7].empty()) r.evaluations = parse_unsigned(f[7], lineno);
    r.f_final = parse_double(f[8], lineno);
    r.x_error = parse_double(f[9], lineno);
    r.success = parse_flag(f[10], lineno);
    r.f_best = parse_double(f[11], lineno);
    r.iterations = parse_unsigned(f[12], lineno);
    r.reason = f[13];
    r.second_order = parse_flag(f[14], lineno);
    r.weighting = parse_flag(f[15], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  struct Acc {
    std::size_t runs = 0;
    double evals = 0.0;
    std::size_t successes = 0;
  };
  using Key = std::tuple<std::size_t, int, std::size_t>;
  std::map<Key, Acc> groups;
  for (const auto& r : rows) {
    SolverKind kind;
    try {
      kind = parse_solver_kind(r.kind);
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedInput, "unknown kind '" + r.kind + "'");
    }
    auto& acc = groups[{r.n, static_cast<int>(kind), r.kd}];
    if (!r.evaluations) continue;
    ++acc.runs;
    acc.evals += static_cast<double>(*r.evaluations);
    acc.successes += r.success ? 1 : 0;
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, acc] : groups) {
    const auto [n, kind, kd] = key;
    SummaryRow s;
    s.n = n;
    s.kind = std::string(cli_name(static_cast<SolverKind>(kind)));
    s.kd = kd;
    s.runs = acc.runs;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.mean_evaluations = acc.runs ? acc.evals / static_cast<double>(acc.runs) : nan;
    s.success_rate = acc.runs ? static_cast<double>(acc.successes) / static_cast<double>(acc.runs) : nan;
    const auto base = groups.find({n, static_cast<int>(SolverKind::Bobyqa), kd});
    if (base != groups.end() && base->second.runs > 0 && acc.runs > 0) {
      const double b = base->second.evals / static_cast<double>(base->second.runs);
      if (b > 0.0) s.delta_vs_bobyqa_percent = 100.0 * (s.mean_evaluations - b) / b;
    }
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    out << s.n << ',' << s.kind << ',' << s.kd << ',' << s.runs << ',' << format_double(s.mean_evaluations) << ','
        << format_double(s.success_rate) << ','
        << (s.delta_vs_bobyqa_percent ? format_double(*s.delta_vs_bobyqa_percent) : std::string()) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.iteration << ',' << r.evaluations << ',' << format_double(r.radius) << ',' << format_double(r.f_best)
        << ',' << (r.accepted ? 1 : 0) << ',' << (r.model_error ? format_double(*r.model_error) : std::string())
        << '\n';
  }
}

}  // namespace hbobyqa
