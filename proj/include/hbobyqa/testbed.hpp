#pragma once

// Analytic test problems, derivative masking and multiplicative noise.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hbobyqa/optimizer.hpp"
#include "hbobyqa/problem.hpp"

namespace hbobyqa {

struct TestProblem {
  std::string name;
  std::size_t dimension = 0;
  Bounds bounds;
  Vector x0;
  Vector x_opt;
  double f_opt = 0.0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;

  TaylorData taylor(const Vector& x) const { return {value(x), gradient(x), hessian(x)}; }
};

TestProblem rosenbrock(std::size_t n = 2);
TestProblem sphere(std::size_t n);
TestProblem beale();
TestProblem booth();
TestProblem wood();
TestProblem powell_singular();
TestProblem trid(std::size_t n);
TestProblem dixon_price(std::size_t n);
TestProblem zakharov(std::size_t n);
TestProblem box_quadratic();

/// Names of every analytic problem, in registry order.
std::vector<std::string> analytic_problem_names();
/// Throws UnknownProblem for names not in analytic_problem_names().
TestProblem make_problem(const std::string& name);

/// Spec exposing only the derivatives in first_order / second_order
/// (0-based directions).
ObjectiveSpec mask_availability(const TestProblem& problem, std::vector<int> first_order,
                                std::vector<IndexPair> second_order = {});

/// Multiplies every value and every derivative component by (1 + xi) with a
/// fresh xi ~ U(-amplitude, amplitude) per call. The returned spec owns its
/// random source; amplitude 0 returns the inner spec unchanged.
ObjectiveSpec add_noise(const ObjectiveSpec& inner, double amplitude, std::uint64_t seed);

enum class NoiseLevel { None, Low, High };
double noise_amplitude(NoiseLevel level);
NoiseLevel parse_noise_level(const std::string& name);
std::string to_string(NoiseLevel level);

}  // namespace hbobyqa
