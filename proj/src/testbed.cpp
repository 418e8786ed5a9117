#include "hbobyqa/testbed.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace hbobyqa {

namespace {

Bounds box(std::size_t n, double lo, double hi) {
  return Bounds(Vector::Constant(static_cast<Eigen::Index>(n), lo),
                Vector::Constant(static_cast<Eigen::Index>(n), hi));
}

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

void require_dimension(std::size_t n, std::size_t min, const char* what) {
  if (n < min) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": dimension too small");
}

}  // namespace

TestProblem rosenbrock(std::size_t n) {
  require_dimension(n, 2, "rosenbrock");
  TestProblem p;
  p.name = "rosenbrock" + std::to_string(n);
  p.dimension = n;
  p.bounds = box(n, -5.0, 5.0);
  if (n == 2) {
    p.x0 = Vector{{1.2, 2.0}};
  } else {
    p.x0.resize(idx(n));
    for (Eigen::Index i = 0; i < idx(n); ++i) p.x0[i] = (i % 2 == 0) ? -1.2 : 1.0;
  }
  p.x_opt = Vector::Ones(idx(n));
  p.f_opt = 0.0;
  p.value = [](const Vector& x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      f += 100.0 * a * a + b * b;
    }
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * a;
    }
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix h = Matrix::Zero(x.size(), x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      h(i, i) += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
      h(i, i + 1) += -400.0 * x[i];
      h(i + 1, i) += -400.0 * x[i];
      h(i + 1, i + 1) += 200.0;
    }
    return h;
  };
  return p;
}

TestProblem sphere(std::size_t n) {
  require_dimension(n, 1, "sphere");
  TestProblem p;
  p.name = "sphere" + std::to_string(n);
  p.dimension = n;
  p.bounds = box(n, -2.0, 2.0);
  p.x0 = Vector::Ones(idx(n));
  p.x_opt = Vector::Zero(idx(n));
  p.value = [](const Vector& x) { return x.squaredNorm(); };
  p.gradient = [](const Vector& x) -> Vector { return 2.0 * x; };
  p.hessian = [](const Vector& x) -> Matrix { return 2.0 * Matrix::Identity(x.size(), x.size()); };
  return p;
}

TestProblem beale() {
  static constexpr double c[3] = {1.5, 2.25, 2.625};
  TestProblem p;
  p.name = "beale2";
  p.dimension = 2;
  p.bounds = box(2, -4.5, 4.5);
  p.x0 = Vector{{1.0, 1.0}};
  p.x_opt = Vector{{3.0, 0.5}};
  p.value = [](const Vector& x) {
    double f = 0.0;
    for (int k = 1; k <= 3; ++k) {
      const double t = c[k - 1] - x[0] + x[0] * std::pow(x[1], k);
      f += t * t;
    }
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g = Vector::Zero(2);
    for (int k = 1; k <= 3; ++k) {
      const double t = c[k - 1] - x[0] + x[0] * std::pow(x[1], k);
      g[0] += 2.0 * t * (std::pow(x[1], k) - 1.0);
      g[1] += 2.0 * t * k * x[0] * std::pow(x[1], k - 1);
    }
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix h = Matrix::Zero(2, 2);
    for (int k = 1; k <= 3; ++k) {
      const double t = c[k - 1] - x[0] + x[0] * std::pow(x[1], k);
      const double tx = std::pow(x[1], k) - 1.0;
      const double ty = k * x[0] * std::pow(x[1], k - 1);
      const double txy = k * std::pow(x[1], k - 1);
      const double tyy = k >= 2 ? k * (k - 1) * x[0] * std::pow(x[1], k - 2) : 0.0;
      h(0, 0) += 2.0 * tx * tx;
      h(0, 1) += 2.0 * (tx * ty + t * txy);
      h(1, 1) += 2.0 * (ty * ty + t * tyy);
    }
    h(1, 0) = h(0, 1);
    return h;
  };
  return p;
}

TestProblem booth() {
  TestProblem p;
  p.name = "booth2";
  p.dimension = 2;
  p.bounds = box(2, -10.0, 10.0);
  p.x0 = Vector::Zero(2);
  p.x_opt = Vector{{1.0, 3.0}};
  p.value = [](const Vector& x) {
    const double a = x[0] + 2.0 * x[1] - 7.0;
    const double b = 2.0 * x[0] + x[1] - 5.0;
    return a * a + b * b;
  };
  p.gradient = [](const Vector& x) {
    const double a = x[0] + 2.0 * x[1] - 7.0;
    const double b = 2.0 * x[0] + x[1] - 5.0;
    return Vector{{2.0 * a + 4.0 * b, 4.0 * a + 2.0 * b}};
  };
  p.hessian = [](const Vector&) { return Matrix{{10.0, 8.0}, {8.0, 10.0}}; };
  return p;
}

TestProblem wood() {
  TestProblem p;
  p.name = "wood4";
  p.dimension = 4;
  p.bounds = box(4, -10.0, 10.0);
  p.x0 = Vector{{-3.0, -1.0, -3.0, -1.0}};
  p.x_opt = Vector::Ones(4);
  p.value = [](const Vector& x) {
    const double a = x[1] - x[0] * x[0];
    const double b = x[3] - x[2] * x[2];
    return 100.0 * a * a + (1.0 - x[0]) * (1.0 - x[0]) + 90.0 * b * b + (1.0 - x[2]) * (1.0 - x[2]) +
           10.1 * ((x[1] - 1.0) * (x[1] - 1.0) + (x[3] - 1.0) * (x[3] - 1.0)) +
           19.8 * (x[1] - 1.0) * (x[3] - 1.0);
  };
  p.gradient = [](const Vector& x) {
    const double a = x[1] - x[0] * x[0];
    const double b = x[3] - x[2] * x[2];
    return Vector{{-400.0 * x[0] * a - 2.0 * (1.0 - x[0]),
                   200.0 * a + 20.2 * (x[1] - 1.0) + 19.8 * (x[3] - 1.0),
                   -360.0 * x[2] * b - 2.0 * (1.0 - x[2]),
                   180.0 * b + 20.2 * (x[3] - 1.0) + 19.8 * (x[1] - 1.0)}};
  };
  p.hessian = [](const Vector& x) {
    Matrix h = Matrix::Zero(4, 4);
    h(0, 0) = 1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0;
    h(0, 1) = h(1, 0) = -400.0 * x[0];
    h(1, 1) = 220.2;
    h(1, 3) = h(3, 1) = 19.8;
    h(2, 2) = 1080.0 * x[2] * x[2] - 360.0 * x[3] + 2.0;
    h(2, 3) = h(3, 2) = -360.0 * x[2];
    h(3, 3) = 200.2;
    return h;
  };
  return p;
}

TestProblem powell_singular() {
  TestProblem p;
  p.name = "powell4";
  p.dimension = 4;
  p.bounds = box(4, -4.0, 5.0);
  p.x0 = Vector{{3.0, -1.0, 0.0, 1.0}};
  p.x_opt = Vector::Zero(4);
  p.value = [](const Vector& x) {
    const double a = x[0] + 10.0 * x[1];
    const double b = x[2] - x[3];
    const double c = x[1] - 2.0 * x[2];
    const double d = x[0] - x[3];
    return a * a + 5.0 * b * b + std::pow(c, 4) + 10.0 * std::pow(d, 4);
  };
  p.gradient = [](const Vector& x) {
    const double a = x[0] + 10.0 * x[1];
    const double b = x[2] - x[3];
    const double c3 = std::pow(x[1] - 2.0 * x[2], 3);
    const double d3 = std::pow(x[0] - x[3], 3);
    return Vector{{2.0 * a + 40.0 * d3, 20.0 * a + 4.0 * c3, 10.0 * b - 8.0 * c3, -10.0 * b - 40.0 * d3}};
  };
  p.hessian = [](const Vector& x) {
    const double c = x[1] - 2.0 * x[2];
    const double d = x[0] - x[3];
    const Vector wa{{1.0, 10.0, 0.0, 0.0}};
    const Vector wb{{0.0, 0.0, 1.0, -1.0}};
    const Vector wc{{0.0, 1.0, -2.0, 0.0}};
    const Vector wd{{1.0, 0.0, 0.0, -1.0}};
    Matrix h = 2.0 * wa * wa.transpose() + 10.0 * wb * wb.transpose() +
               12.0 * c * c * wc * wc.transpose() + 120.0 * d * d * wd * wd.transpose();
    return h;
  };
  return p;
}

TestProblem trid(std::size_t n) {
  require_dimension(n, 2, "trid");
  TestProblem p;
  p.name = "trid" + std::to_string(n);
  p.dimension = n;
  const double r = static_cast<double>(n * n);
  p.bounds = box(n, -r, r);
  p.x0 = Vector::Zero(idx(n));
  p.x_opt.resize(idx(n));
  for (std::size_t i = 1; i <= n; ++i) p.x_opt[idx(i - 1)] = static_cast<double>(i * (n + 1 - i));
  const double nd = static_cast<double>(n);
  p.f_opt = -nd * (nd + 4.0) * (nd - 1.0) / 6.0;
  p.value = [](const Vector& x) {
    double f = (x.array() - 1.0).square().sum();
    for (Eigen::Index i = 1; i < x.size(); ++i) f -= x[i] * x[i - 1];
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g = 2.0 * (x.array() - 1.0);
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      g[i] -= x[i - 1];
      g[i - 1] -= x[i];
    }
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix h = 2.0 * Matrix::Identity(x.size(), x.size());
    for (Eigen::Index i = 1; i < x.size(); ++i) h(i, i - 1) = h(i - 1, i) = -1.0;
    return h;
  };
  return p;
}

TestProblem dixon_price(std::size_t n) {
  require_dimension(n, 2, "dixon_price");
  TestProblem p;
  p.name = "dixonprice" + std::to_string(n);
  p.dimension = n;
  p.bounds = box(n, -10.0, 10.0);
  p.x0 = Vector::Ones(idx(n));
  p.x_opt.resize(idx(n));
  for (std::size_t i = 1; i <= n; ++i) {
    const double e = std::ldexp(1.0, static_cast<int>(i));
    p.x_opt[idx(i - 1)] = std::pow(2.0, -(e - 2.0) / e);
  }
  p.value = [](const Vector& x) {
    double f = (x[0] - 1.0) * (x[0] - 1.0);
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      const double u = 2.0 * x[i] * x[i] - x[i - 1];
      f += static_cast<double>(i + 1) * u * u;
    }
    return f;
  };
  p.gradient = [](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    g[0] = 2.0 * (x[0] - 1.0);
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      const double c = static_cast<double>(i + 1);
      const double u = 2.0 * x[i] * x[i] - x[i - 1];
      g[i] += 8.0 * c * u * x[i];
      g[i - 1] -= 2.0 * c * u;
    }
    return g;
  };
  p.hessian = [](const Vector& x) {
    Matrix h = Matrix::Zero(x.size(), x.size());
    h(0, 0) = 2.0;
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      const double c = static_cast<double>(i + 1);
      const double u = 2.0 * x[i] * x[i] - x[i - 1];
      h(i, i) += c * (32.0 * x[i] * x[i] + 8.0 * u);
      h(i, i - 1) -= 8.0 * c * x[i];
      h(i - 1, i) -= 8.0 * c * x[i];
      h(i - 1, i - 1) += 2.0 * c;
    }
    return h;
  };
  return p;
}

TestProblem zakharov(std::size_t n) {
  require_dimension(n, 1, "zakharov");
  TestProblem p;
  p.name = "zakharov" + std::to_string(n);
  p.dimension = n;
  p.bounds = box(n, -5.0, 10.0);
  p.x0 = Vector::Ones(idx(n));
  p.x_opt = Vector::Zero(idx(n));
  auto weights = [](Eigen::Index m) -> Vector {
    return 0.5 * Vector::LinSpaced(m, 1.0, static_cast<double>(m));
  };
  p.value = [weights](const Vector& x) {
    const double s = weights(x.size()).dot(x);
    return x.squaredNorm() + s * s + s * s * s * s;
  };
  p.gradient = [weights](const Vector& x) -> Vector {
    const Vector c = weights(x.size());
    const double s = c.dot(x);
    return 2.0 * x + (2.0 * s + 4.0 * s * s * s) * c;
  };
  p.hessian = [weights](const Vector& x) -> Matrix {
    const Vector c = weights(x.size());
    const double s = c.dot(x);
    const Matrix h = 2.0 * Matrix::Identity(x.size(), x.size()) + (2.0 + 12.0 * s * s) * c * c.transpose();
    return 0.5 * (h + h.transpose());
  };
  return p;
}

TestProblem box_quadratic() {
  // Separable quadratic whose unconstrained minimizer lies outside the box in
  // two coordinates, so two bounds are active at the solution.
  const Vector a{{1.0, 2.0, 3.0}};
  const Vector t{{2.0, -3.0, 0.25}};
  TestProblem p;
  p.name = "boxquad3";
  p.dimension = 3;
  p.bounds = box(3, -1.0, 1.0);
  p.x0 = Vector::Zero(3);
  p.x_opt = Vector{{1.0, -1.0, 0.25}};
  p.f_opt = 9.0;
  p.value = [a, t](const Vector& x) { return (a.array() * (x - t).array().square()).sum(); };
  p.gradient = [a, t](const Vector& x) -> Vector { return 2.0 * (a.array() * (x - t).array()).matrix(); };
  p.hessian = [a](const Vector&) -> Matrix { return (2.0 * a).asDiagonal(); };
  return p;
}

std::vector<std::string> analytic_problem_names() {
  return {"rosenbrock2", "rosenbrock3", "rosenbrock4", "rosenbrock5", "rosenbrock10",
          "sphere2",     "sphere3",     "sphere5",     "sphere10",    "beale2",
          "booth2",      "wood4",       "powell4",     "trid5",       "trid10",
          "dixonprice3", "zakharov5",   "zakharov10",  "boxquad3"};
}

TestProblem make_problem(const std::string& name) {
  // Family prefix followed by the dimension.
  const auto digits = name.find_first_of("0123456789");
  if (digits != std::string::npos && digits > 0) {
    const std::string family = name.substr(0, digits);
    const std::string tail = name.substr(digits);
    if (tail.find_first_not_of("0123456789") == std::string::npos && tail.size() <= 3) {
      const std::size_t n = std::stoul(tail);
      bool listed = false;
      for (const auto& known : analytic_problem_names()) listed = listed || known == name;
      if (listed) {
        if (family == "rosenbrock") return rosenbrock(n);
        if (family == "sphere") return sphere(n);
        if (family == "beale") return beale();
        if (family == "booth") return booth();
        if (family == "wood") return wood();
        if (family == "powell") return powell_singular();
        if (family == "trid") return trid(n);
        if (family == "dixonprice") return dixon_price(n);
        if (family == "zakharov") return zakharov(n);
        if (family == "boxquad") return box_quadratic();
      }
    }
  }
  throw Error(ErrorCode::UnknownProblem, "unknown problem '" + name + "'");
}

ObjectiveSpec mask_availability(const TestProblem& problem, std::vector<int> first_order,
                                std::vector<IndexPair> second_order) {
  ObjectiveSpec spec;
  spec.dimension = problem.dimension;
  spec.bounds = problem.bounds;
  spec.availability =
      DerivativeAvailability(problem.dimension, std::move(first_order), std::move(second_order));
  spec.value = problem.value;
  auto gradient = problem.gradient;
  auto hessian = problem.hessian;
  spec.first_derivative = [gradient](const Vector& x, int i) { return gradient(x)[i]; };
  spec.second_derivative = [hessian](const Vector& x, int i, int j) { return hessian(x)(i, j); };
  return spec;
}

ObjectiveSpec add_noise(const ObjectiveSpec& inner, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::InvalidArgument, "noise amplitude must be finite and non-negative");
  }
  if (amplitude == 0.0) return inner;

  struct Source {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> xi;
    double factor() { return 1.0 + xi(rng); }
  };
  auto source = std::make_shared<Source>(Source{std::mt19937_64(seed),
                                                std::uniform_real_distribution<double>(-amplitude, amplitude)});

  ObjectiveSpec out = inner;
  out.value = [f = inner.value, source](const Vector& x) { return f(x) * source->factor(); };
  if (inner.first_derivative) {
    out.first_derivative = [g = inner.first_derivative, source](const Vector& x, int i) {
      return g(x, i) * source->factor();
    };
  }
  if (inner.second_derivative) {
    out.second_derivative = [h = inner.second_derivative, source](const Vector& x, int i, int j) {
      return h(x, i, j) * source->factor();
    };
  }
  return out;
}

double noise_amplitude(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::None: return 0.0;
    case NoiseLevel::Low: return 1e-2;
    case NoiseLevel::High: return 1e-1;
  }
  return 0.0;
}

NoiseLevel parse_noise_level(const std::string& name) {
  if (name == "none") return NoiseLevel::None;
  if (name == "low") return NoiseLevel::Low;
  if (name == "high") return NoiseLevel::High;
  throw Error(ErrorCode::InvalidArgument, "noise level must be none, low or high, got '" + name + "'");
}

std::string to_string(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::None: return "none";
    case NoiseLevel::Low: return "low";
    case NoiseLevel::High: return "high";
  }
  return "none";
}

}  // namespace hbobyqa
