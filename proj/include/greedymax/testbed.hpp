#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "greedymax/core.hpp"
#include "greedymax/tuning.hpp"

namespace greedymax {

/// Coordinatewise clamp of z onto [lo, hi].
inline Vector box_project(const Vector& z, const Vector& lo, const Vector& hi) { return Box(lo, hi).project(z); }

namespace testbed_detail {

inline ObjectiveSpec scalar_spec(std::string name, std::function<double(double, double)> f,
                                 std::function<double(double, double)> fx, std::function<double(double, double)> fy) {
  ObjectiveSpec s;
  s.name = std::move(name);
  s.dim_x = 1;
  s.dim_y = 1;
  s.value = [f](const Vector& x, const Vector& y) { return f(x[0], y[0]); };
  s.grad_x = [fx](const Vector& x, const Vector& y) { return Vector::Constant(1, fx(x[0], y[0])); };
  s.grad_y = [fy](const Vector& x, const Vector& y) { return Vector::Constant(1, fy(x[0], y[0])); };
  return s;
}

// Largest |eigenvalue| of the constant Hessians [[-6,4],[4,-2]] and [[6,4],[4,2]].
inline const double kQuadraticL = 4.0 + std::sqrt(20.0);

inline ObjectiveSpec f1() {
  auto s = scalar_spec(
      "F1", [](double x, double y) { return -3.0 * x * x - y * y + 4.0 * x * y; },
      [](double x, double y) { return -6.0 * x + 4.0 * y; }, [](double x, double y) { return -2.0 * y + 4.0 * x; });
  s.lip_grad_L = kQuadraticL;
  return s;
}

inline ObjectiveSpec f2() {
  auto s = scalar_spec(
      "F2", [](double x, double y) { return 3.0 * x * x + y * y + 4.0 * x * y; },
      [](double x, double y) { return 6.0 * x + 4.0 * y; }, [](double x, double y) { return 2.0 * y + 4.0 * x; });
  s.lip_grad_L = kQuadraticL;
  return s;
}

// (4x^2 - u^2 - 0.1 y^4) e^{-0.01 (x^2 + y^2)} with u = y - 3x + 0.05 x^3.
inline ObjectiveSpec f3_raw(std::string name) {
  return scalar_spec(
      std::move(name),
      [](double x, double y) {
        const double u = y - 3.0 * x + 0.05 * x * x * x;
        return (4.0 * x * x - u * u - 0.1 * y * y * y * y) * std::exp(-0.01 * (x * x + y * y));
      },
      [](double x, double y) {
        const double u = y - 3.0 * x + 0.05 * x * x * x;
        const double e = std::exp(-0.01 * (x * x + y * y));
        const double g = 4.0 * x * x - u * u - 0.1 * y * y * y * y;
        return (8.0 * x - 2.0 * u * (-3.0 + 0.15 * x * x)) * e - 0.02 * x * g * e;
      },
      [](double x, double y) {
        const double u = y - 3.0 * x + 0.05 * x * x * x;
        const double e = std::exp(-0.01 * (x * x + y * y));
        const double g = 4.0 * x * x - u * u - 0.1 * y * y * y * y;
        return (-2.0 * u - 0.4 * y * y * y) * e - 0.02 * y * g * e;
      });
}

inline ObjectiveSpec f3_formula(std::string name) {
  auto s = f3_raw(std::move(name));
  // Constants are not known in closed form: estimate over [-10,10]^2 and inflate by 10%.
  static const SmoothnessEstimate est = [] {
    const auto probe = f3_raw("F3");
    return estimate_smoothness(probe, Box::cube(1, -10.0, 10.0), Box::cube(1, -10.0, 10.0), 200000, 3);
  }();
  s.bound_b = 1.1 * est.b_hat;
  s.lip_grad_L = 1.1 * est.L_hat;
  s.constants_region_x = Box::cube(1, -10.0, 10.0);
  s.constants_region_y = Box::cube(1, -10.0, 10.0);
  s.constants_estimated = true;
  return s;
}

inline ObjectiveSpec bilinear(std::string name) {
  auto s = scalar_spec(
      std::move(name), [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
  s.lip_grad_L = 1.0;
  return s;
}

}  // namespace testbed_detail

/// Registered benchmark names.
inline const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names{"F1", "F2", "F3", "FIntro", "BilinearCompact", "BilinearFree"};
  return names;
}

/// Build a benchmark objective by name.
///
/// F1 = -3x^2 - y^2 + 4xy and F2 = 3x^2 + y^2 + 4xy are unbounded quadratics with
/// exact L. F3 and FIntro share a closed form and carry estimated constants over
/// [-10,10]^2. BilinearCompact is xy on [-1,1]^2, BilinearFree is xy on R^2.
inline ObjectiveSpec make_function(std::string_view name) {
  using namespace testbed_detail;
  if (name == "F1") return f1();
  if (name == "F2") return f2();
  if (name == "F3") return f3_formula("F3");
  if (name == "FIntro") return f3_formula("FIntro");
  if (name == "BilinearFree") return bilinear("BilinearFree");
  if (name == "BilinearCompact") {
    auto s = bilinear("BilinearCompact");
    s.bound_b = 1.0;
    s.domain_x = Box::cube(1, -1.0, 1.0);
    s.domain_y = Box::cube(1, -1.0, 1.0);
    return s;
  }
  throw ConfigError("unknown function '" + std::string(name) + "'");
}

/// f(x, y) = c_x . x + c_y . y.
inline ObjectiveSpec make_linear(const Vector& cx, const Vector& cy) {
  ObjectiveSpec s;
  s.name = "linear";
  s.dim_x = static_cast<int>(cx.size());
  s.dim_y = static_cast<int>(cy.size());
  s.value = [cx, cy](const Vector& x, const Vector& y) { return cx.dot(x) + cy.dot(y); };
  s.grad_x = [cx](const Vector&, const Vector&) { return cx; };
  s.grad_y = [cy](const Vector&, const Vector&) { return cy; };
  s.lip_grad_L = 0.0;
  return s;
}

/// f(x, y) = c.
inline ObjectiveSpec make_constant(double c, int dim_x = 1, int dim_y = 1) {
  ObjectiveSpec s;
  s.name = "constant";
  s.dim_x = dim_x;
  s.dim_y = dim_y;
  s.value = [c](const Vector&, const Vector&) { return c; };
  s.grad_x = [dim_x](const Vector&, const Vector&) { return Vector(Vector::Zero(dim_x)); };
  s.grad_y = [dim_y](const Vector&, const Vector&) { return Vector(Vector::Zero(dim_y)); };
  s.bound_b = std::abs(c);
  s.lip_grad_L = 0.0;
  return s;
}

/// f(x, y) = x^2 - y^2, strict local (and global) min-max at the origin.
inline ObjectiveSpec make_quadratic_saddle() {
  auto s = testbed_detail::scalar_spec(
      "saddle", [](double x, double y) { return x * x - y * y; }, [](double x, double) { return 2.0 * x; },
      [](double, double y) { return -2.0 * y; });
  s.lip_grad_L = 2.0;
  return s;
}

/// Components f_i(x, y) = c sin(u_i . x + v_i . y). Rows of `frequencies` are the
/// concatenated (u_i, v_i); each component has b = |c| and L = |c| ||(u_i, v_i)||^2.
inline EmpiricalObjective make_sine_family(const Eigen::MatrixXd& frequencies, int dim_x, int dim_y, double amplitude) {
  if (frequencies.rows() < 1) throw ConfigError("sine family needs m >= 1");
  if (frequencies.cols() != dim_x + dim_y) throw ConfigError("sine family: frequency width != dim_x + dim_y");
  std::vector<ObjectiveSpec> parts;
  parts.reserve(static_cast<std::size_t>(frequencies.rows()));
  for (Eigen::Index i = 0; i < frequencies.rows(); ++i) {
    const Vector u = frequencies.row(i).head(dim_x).transpose();
    const Vector v = frequencies.row(i).tail(dim_y).transpose();
    const double c = amplitude;
    ObjectiveSpec s;
    s.name = "sine_" + std::to_string(i);
    s.dim_x = dim_x;
    s.dim_y = dim_y;
    s.value = [u, v, c](const Vector& x, const Vector& y) { return c * std::sin(u.dot(x) + v.dot(y)); };
    s.grad_x = [u, v, c](const Vector& x, const Vector& y) { return Vector(c * std::cos(u.dot(x) + v.dot(y)) * u); };
    s.grad_y = [u, v, c](const Vector& x, const Vector& y) { return Vector(c * std::cos(u.dot(x) + v.dot(y)) * v); };
    s.bound_b = std::abs(c);
    s.lip_grad_L = std::abs(c) * frequencies.row(i).squaredNorm();
    parts.push_back(std::move(s));
  }
  return EmpiricalObjective(std::move(parts));
}

/// Sine family with m random unit-norm frequency vectors drawn from `seed`.
inline EmpiricalObjective make_sine_family(std::size_t m, int dim_x, int dim_y, double amplitude, std::uint64_t seed) {
  if (m < 1) throw ConfigError("sine family needs m >= 1");
  CounterRng rng = substream(seed, "sine_family");
  Eigen::MatrixXd freq(static_cast<Eigen::Index>(m), dim_x + dim_y);
  for (Eigen::Index i = 0; i < freq.rows(); ++i) {
    for (Eigen::Index j = 0; j < freq.cols(); ++j) freq(i, j) = rng.normal();
    freq.row(i).normalize();
  }
  return make_sine_family(freq, dim_x, dim_y, amplitude);
}

}  // namespace greedymax
