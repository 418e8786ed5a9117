// Python bindings: a callable-based minimize(), the problem registry, the
// benchmark harness and the yield estimator.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hbobyqa/bench.hpp"
#include "hbobyqa/optimizer.hpp"
#include "hbobyqa/testbed.hpp"
#include "hbobyqa/yield.hpp"

namespace py = pybind11;
using namespace hbobyqa;

namespace {

// Caches the last full gradient or Hessian so that per-component queries at
// one point cost a single Python call.
template <class T>
struct PointCache {
  Vector x;
  T data;
  bool valid = false;

  template <class F>
  const T& get(const Vector& at, F&& compute) {
    if (!valid || x.size() != at.size() ||
        std::memcmp(x.data(), at.data(), sizeof(double) * static_cast<std::size_t>(at.size())) != 0) {
      data = compute(at);
      x = at;
      valid = true;
    }
    return data;
  }
};

std::vector<IndexPair> to_pairs(const std::vector<std::pair<int, int>>& in) {
  return {in.begin(), in.end()};
}

py::dict trace_row_dict(const TraceRow& r) {
  py::dict d;
  d["iteration"] = r.iteration;
  d["evaluations"] = r.evaluations;
  d["radius"] = r.radius;
  d["f_best"] = r.f_best;
  d["accepted"] = r.accepted;
  d["model_error"] = r.model_error ? py::cast(*r.model_error) : py::none();
  return d;
}

py::dict result_dict(const RunResult& r) {
  py::dict d;
  d["x"] = r.x_best;
  d["fun"] = r.f_best;
  d["evaluations"] = r.evaluations;
  d["iterations"] = r.iterations;
  d["reason"] = std::string(to_string(r.reason));
  py::list trace;
  for (const auto& row : r.trace.rows) trace.append(trace_row_dict(row));
  d["trace"] = trace;
  return d;
}

py::dict minimize(const std::function<double(const Vector&)>& fun, const Vector& x0,
                  std::optional<Vector> lower, std::optional<Vector> upper, const std::string& kind,
                  std::optional<std::function<Vector(const Vector&)>> jac, const std::vector<int>& known,
                  std::optional<std::function<Matrix(const Vector&)>> hess,
                  const std::vector<std::pair<int, int>>& known_pairs, std::size_t budget, double rho_end,
                  std::optional<double> initial_radius, bool second_order, bool weighting, double weighting_s,
                  std::optional<std::size_t> p1) {
  const auto n = static_cast<std::size_t>(x0.size());
  ObjectiveSpec spec;
  spec.dimension = n;
  const double inf = std::numeric_limits<double>::infinity();
  spec.bounds = Bounds(lower.value_or(Vector::Constant(x0.size(), -inf)),
                       upper.value_or(Vector::Constant(x0.size(), inf)));
  if (!known.empty() && !jac) throw Error(ErrorCode::InvalidArgument, "known directions need jac");
  if (!known_pairs.empty() && !hess) throw Error(ErrorCode::InvalidArgument, "known pairs need hess");
  spec.availability = DerivativeAvailability(n, known, to_pairs(known_pairs));
  spec.value = fun;
  if (jac) {
    auto cache = std::make_shared<PointCache<Vector>>();
    auto f = *jac;
    spec.first_derivative = [cache, f](const Vector& x, int i) {
      const Vector& g = cache->get(x, f);
      if (i >= g.size()) throw Error(ErrorCode::MalformedInput, "jac returned too few entries");
      return g[i];
    };
  }
  if (hess) {
    auto cache = std::make_shared<PointCache<Matrix>>();
    auto f = *hess;
    spec.second_derivative = [cache, f](const Vector& x, int i, int j) {
      const Matrix& h = cache->get(x, f);
      if (i >= h.rows() || j >= h.cols()) throw Error(ErrorCode::MalformedInput, "hess has the wrong shape");
      return h(i, j);
    };
  }
  SolverConfig config;
  config.kind = parse_solver_kind(kind);
  config.max_evaluations = budget;
  config.rho_end = rho_end;
  config.initial_radius = initial_radius;
  config.second_order = second_order;
  config.weighting.enabled = weighting;
  config.weighting.s = weighting_s;
  config.p1 = p1;
  return result_dict(run(spec, x0, config));
}

py::dict problem_info(const std::string& name) {
  py::dict d;
  d["name"] = name;
  if (is_yield_problem(name)) {
    d["dimension"] = 4;
    d["lower"] = yield_bounds().lower();
    d["upper"] = yield_bounds().upper();
    d["x0"] = yield_start();
    return d;
  }
  const auto p = make_problem(name);
  d["dimension"] = p.dimension;
  d["lower"] = p.bounds.lower();
  d["upper"] = p.bounds.upper();
  d["x0"] = p.x0;
  d["x_opt"] = p.x_opt;
  d["f_opt"] = p.f_opt;
  return d;
}

std::vector<SolverKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<SolverKind> out;
  for (const auto& k : names) out.push_back(parse_solver_kind(k));
  return out;
}

std::string run_plan_csv(const std::vector<std::string>& problems, const std::vector<std::string>& kinds,
                         const std::vector<std::size_t>& kd, const std::vector<std::vector<int>>& masks,
                         std::size_t permutations, std::uint64_t mask_seed, const std::string& noise,
                         const std::vector<std::uint64_t>& seeds, std::size_t budget, bool weighting,
                         double weighting_s, bool second_order, std::optional<std::size_t> workers) {
  ExperimentPlan plan;
  plan.problems = problems;
  plan.kinds = parse_kinds(kinds);
  plan.kd_values = kd;
  plan.masks = masks;
  plan.permutations = permutations;
  plan.mask_seed = mask_seed;
  plan.noise = parse_noise_level(noise);
  plan.seeds = seeds;
  plan.budget = budget;
  plan.weighting = weighting;
  plan.weighting_s = weighting_s;
  plan.second_order = second_order;
  std::vector<ResultRow> rows;
  {
    py::gil_scoped_release release;
    rows = run_plan(plan, workers.value_or(default_workers()));
  }
  std::ostringstream out;
  write_results_csv(out, rows);
  return out.str();
}

std::string summarize_csv(const std::string& results) {
  std::istringstream in(results);
  std::ostringstream out;
  write_summary_csv(out, summarize(read_results_csv(in)));
  return out.str();
}

YieldNoise parse_yield_noise(const std::string& name) {
  switch (parse_noise_level(name)) {
    case NoiseLevel::None: return YieldNoise::NoNoise;
    case NoiseLevel::Low: return YieldNoise::LowNoise;
    case NoiseLevel::High: return YieldNoise::HighNoise;
  }
  return YieldNoise::NoNoise;
}

}  // namespace

PYBIND11_MODULE(_hbobyqa, m) {
  m.doc() = "Trust-region optimization with partially known derivatives";

  static py::exception<Error> error_type(m, "HbobyqaError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      py::setattr(instance, "code", py::str(std::string(to_string(e.code()))));
      PyErr_SetObject(error_type.ptr(), instance.ptr());
    }
  });

  m.def("minimize", &minimize, py::arg("fun"), py::arg("x0"), py::arg("lower") = py::none(),
        py::arg("upper") = py::none(), py::kw_only(), py::arg("kind") = "bobyqa", py::arg("jac") = py::none(),
        py::arg("known") = std::vector<int>{}, py::arg("hess") = py::none(),
        py::arg("known_pairs") = std::vector<std::pair<int, int>>{}, py::arg("budget") = 1000,
        py::arg("rho_end") = 1e-8, py::arg("initial_radius") = py::none(), py::arg("second_order") = false,
        py::arg("weighting") = false, py::arg("weighting_s") = 5.0, py::arg("p1") = py::none(),
        "Minimize fun over the box. jac(x) returns the full gradient; only the entries in known\n"
        "(0-based) are used. hess(x) returns the Hessian; only known_pairs are used.");

  m.def("solver_kinds", [] {
    std::vector<std::string> out;
    for (auto k : {SolverKind::FullInterp, SolverKind::Bobyqa, SolverKind::HermiteLS, SolverKind::HermiteBobyqa})
      out.emplace_back(cli_name(k));
    return out;
  });
  m.def("problem_names", &problem_names);
  m.def("problem_info", &problem_info, py::arg("name"));
  m.def(
      "problem_value",
      [](const std::string& name, const Vector& x) {
        if (is_yield_problem(name)) return -exact_surrogate_yield(x);
        return make_problem(name).value(x);
      },
      py::arg("name"), py::arg("x"), "Noise-free objective; for yield problems the exact -Y.");
  m.def(
      "problem_gradient", [](const std::string& name, const Vector& x) { return make_problem(name).gradient(x); },
      py::arg("name"), py::arg("x"));

  m.def("run_plan", &run_plan_csv, py::arg("problems"), py::kw_only(),
        py::arg("kinds") = std::vector<std::string>{"bobyqa", "hermite-ls"},
        py::arg("kd") = std::vector<std::size_t>{1}, py::arg("masks") = std::vector<std::vector<int>>{},
        py::arg("permutations") = 3, py::arg("mask_seed") = 0, py::arg("noise") = "none",
        py::arg("seeds") = std::vector<std::uint64_t>{0}, py::arg("budget") = 1000, py::arg("weighting") = false,
        py::arg("weighting_s") = 5.0, py::arg("second_order") = false, py::arg("workers") = py::none(),
        "Runs the plan and returns the results CSV. Masks are 0-based here and 1-based in the CSV.");
  m.def("summarize", &summarize_csv, py::arg("results_csv"), "Summary CSV from a results CSV.");

  m.def(
      "yield_estimate",
      [](const Vector& x, const std::string& noise, std::uint64_t seed) {
        YieldEstimator est(make_yield_problem(parse_yield_noise(noise), seed));
        const auto e = est.estimate(x);
        return py::make_tuple(e.yield, e.gradient);
      },
      py::arg("x"), py::arg("noise") = "none", py::arg("seed") = 0,
      "Monte Carlo yield and its gradient with respect to the two means.");
  m.def("exact_yield", [](const Vector& x) { return exact_surrogate_yield(x); }, py::arg("x"));
}
