#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "greedymax/errors.hpp"
#include "greedymax/rng.hpp"

namespace greedymax {

using Vector = Eigen::VectorXd;

/// Axis-aligned box [lo, hi] per coordinate.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lower, Vector upper) : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw ConfigError("box bounds have different dimensions");
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) throw ConfigError("box bound lo > hi at coordinate " + std::to_string(i));
    }
  }

  static Box cube(int dim, double lower, double upper) {
    return Box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vector& z, double tol = 0.0) const {
    return z.size() == lo.size() && ((z - lo).array() >= -tol).all() && ((hi - z).array() >= -tol).all();
  }

  /// Euclidean projection (coordinatewise clamp).
  Vector project(const Vector& z) const {
    if (z.size() != lo.size()) throw ConfigError("projection: dimension mismatch");
    return z.cwiseMax(lo).cwiseMin(hi);
  }

  /// Uniform sample inside the box.
  Vector sample(CounterRng& rng) const {
    Vector z(lo.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
    return z;
  }
};

using ValueFn = std::function<double(const Vector&, const Vector&)>;
using GradFn = std::function<Vector(const Vector&, const Vector&)>;

struct Gradients {
  Vector x;
  Vector y;
};

/// A differentiable loss f(x, y) with closed-form gradients and smoothness metadata.
///
/// `bound_b` empty means unbounded, `lip_grad_L` empty means unknown. An empty
/// domain means all of space. When the constants were estimated numerically they
/// hold over `constants_region_*` only and `constants_estimated` is set.
struct ObjectiveSpec {
  std::string name;
  int dim_x = 1;
  int dim_y = 1;
  ValueFn value;
  GradFn grad_x;
  GradFn grad_y;
  std::optional<double> bound_b;
  std::optional<double> lip_grad_L;
  std::optional<Box> domain_x;
  std::optional<Box> domain_y;
  std::optional<Box> constants_region_x;
  std::optional<Box> constants_region_y;
  bool constants_estimated = false;

  bool bounded() const { return bound_b.has_value(); }

  /// Value-Lipschitz constant sqrt(2 L b), when both constants are known.
  std::optional<double> lip_value_L1() const {
    if (!bound_b || !lip_grad_L) return std::nullopt;
    return std::sqrt(2.0 * *lip_grad_L * *bound_b);
  }
};

namespace detail {

inline void check_dims(const ObjectiveSpec& obj, const Vector& x, const Vector& y) {
  if (x.size() != obj.dim_x || y.size() != obj.dim_y) {
    throw ConfigError(obj.name + ": dimension mismatch (got " + std::to_string(x.size()) + "," +
                      std::to_string(y.size()) + ", expected " + std::to_string(obj.dim_x) + "," +
                      std::to_string(obj.dim_y) + ")");
  }
}

inline void check_domain(const ObjectiveSpec& obj, const Vector& x, const Vector& y) {
  constexpr double tol = 1e-12;
  if ((obj.domain_x && !obj.domain_x->contains(x, tol)) || (obj.domain_y && !obj.domain_y->contains(y, tol))) {
    throw ConfigError(obj.name + ": point outside the declared domain");
  }
}

inline void check_finite(const ObjectiveSpec& obj, double v) {
  if (!std::isfinite(v)) throw EvaluationError(obj.name + ": non-finite value");
}

inline void check_finite(const ObjectiveSpec& obj, const Vector& g) {
  if (!g.allFinite()) throw EvaluationError(obj.name + ": non-finite gradient");
}

}  // namespace detail

inline double eval_value(const ObjectiveSpec& obj, const Vector& x, const Vector& y) {
  detail::check_dims(obj, x, y);
  detail::check_domain(obj, x, y);
  const double v = obj.value(x, y);
  detail::check_finite(obj, v);
  return v;
}

inline Vector eval_grad_y(const ObjectiveSpec& obj, const Vector& x, const Vector& y) {
  detail::check_dims(obj, x, y);
  detail::check_domain(obj, x, y);
  Vector g = obj.grad_y(x, y);
  detail::check_finite(obj, g);
  return g;
}

inline Vector eval_grad_x(const ObjectiveSpec& obj, const Vector& x, const Vector& y) {
  detail::check_dims(obj, x, y);
  detail::check_domain(obj, x, y);
  if (!obj.grad_x) throw ConfigError(obj.name + ": no x-gradient available");
  Vector g = obj.grad_x(x, y);
  detail::check_finite(obj, g);
  return g;
}

inline Gradients eval_grads(const ObjectiveSpec& obj, const Vector& x, const Vector& y) {
  return {eval_grad_x(obj, x, y), eval_grad_y(obj, x, y)};
}

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|, |numeric|).
inline double finite_diff_check(const ObjectiveSpec& obj, const Vector& x, const Vector& y, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_check: step must be positive");
  detail::check_dims(obj, x, y);
  const auto near_edge = [h](const std::optional<Box>& box, const Vector& z) {
    return box && (((z - box->lo).array() < h).any() || ((box->hi - z).array() < h).any());
  };
  if (near_edge(obj.domain_x, x) || near_edge(obj.domain_y, y)) {
    throw ConfigError("finite_diff_check: point too close to the box boundary for step h");
  }
  const Gradients g = eval_grads(obj, x, y);
  double worst = 0.0;
  const auto compare = [&worst](double analytic, double numeric) {
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  };
  for (int i = 0; i < obj.dim_x; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    compare(g.x[i], (eval_value(obj, xp, y) - eval_value(obj, xm, y)) / (2.0 * h));
  }
  for (int i = 0; i < obj.dim_y; ++i) {
    Vector yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    compare(g.y[i], (eval_value(obj, x, yp) - eval_value(obj, x, ym)) / (2.0 * h));
  }
  return worst;
}

/// f = (1/m) sum_i f_i over m component losses sharing dimensions.
struct EmpiricalObjective {
  std::vector<ObjectiveSpec> components;

  EmpiricalObjective() = default;
  explicit EmpiricalObjective(std::vector<ObjectiveSpec> parts) : components(std::move(parts)) {
    if (components.empty()) throw ConfigError("empirical objective needs at least one component");
    for (const auto& c : components) {
      if (c.dim_x != components.front().dim_x || c.dim_y != components.front().dim_y) {
        throw ConfigError("empirical objective components disagree on dimensions");
      }
    }
  }

  std::size_t m() const { return components.size(); }

  /// The full objective as a single spec. Constants are the worst case over components.
  ObjectiveSpec mean_spec(std::string name = "empirical") const {
    if (components.empty()) throw ConfigError("empirical objective has no components");
    if (components.size() == 1) return components.front();
    auto parts = std::make_shared<const std::vector<ObjectiveSpec>>(components);
    const ObjectiveSpec& first = components.front();
    ObjectiveSpec spec;
    spec.name = std::move(name);
    spec.dim_x = first.dim_x;
    spec.dim_y = first.dim_y;
    spec.domain_x = first.domain_x;
    spec.domain_y = first.domain_y;
    spec.constants_region_x = first.constants_region_x;
    spec.constants_region_y = first.constants_region_y;
    const double inv_m = 1.0 / static_cast<double>(components.size());
    spec.value = [parts, inv_m](const Vector& x, const Vector& y) {
      double s = 0.0;
      for (const auto& c : *parts) s += c.value(x, y);
      return s * inv_m;
    };
    spec.grad_y = [parts, inv_m](const Vector& x, const Vector& y) {
      Vector s = Vector::Zero(parts->front().dim_y);
      for (const auto& c : *parts) s += c.grad_y(x, y);
      return Vector(s * inv_m);
    };
    const bool all_grad_x = std::all_of(components.begin(), components.end(),
                                        [](const ObjectiveSpec& c) { return static_cast<bool>(c.grad_x); });
    if (all_grad_x) {
      spec.grad_x = [parts, inv_m](const Vector& x, const Vector& y) {
        Vector s = Vector::Zero(parts->front().dim_x);
        for (const auto& c : *parts) s += c.grad_x(x, y);
        return Vector(s * inv_m);
      };
    }
    bool all_b = true, all_L = true;
    double b = 0.0, L = 0.0;
    for (const auto& c : components) {
      all_b = all_b && c.bound_b.has_value();
      all_L = all_L && c.lip_grad_L.has_value();
      if (c.bound_b) b = std::max(b, *c.bound_b);
      if (c.lip_grad_L) L = std::max(L, *c.lip_grad_L);
      spec.constants_estimated = spec.constants_estimated || c.constants_estimated;
    }
    if (all_b) spec.bound_b = b;
    if (all_L) spec.lip_grad_L = L;
    return spec;
  }
};

enum class OracleMode { Deterministic, Stochastic };

struct BatchSizes {
  std::size_t value = 1;   // b0
  std::size_t grad_x = 1;  // bx
  std::size_t grad_y = 1;  // by
};

struct OracleCounters {
  std::uint64_t value_calls = 0;
  std::uint64_t grad_x_calls = 0;
  std::uint64_t grad_y_calls = 0;
  std::uint64_t component_evals = 0;

  friend bool operator==(const OracleCounters&, const OracleCounters&) = default;
};

/// Value and gradient oracles F, G_x, G_y over an empirical objective.
///
/// Stochastic mode averages a batch of component indices drawn iid with
/// replacement from [m]. The batch stream is owned by the oracle, so two oracles
/// built with the same seed produce identical output sequences. An oracle is not
/// thread-safe; give each worker its own.
class OracleSet {
 public:
  OracleSet(EmpiricalObjective objective, OracleMode mode, BatchSizes batches, std::uint64_t seed)
      : objective_(std::move(objective)),
        exact_(objective_.mean_spec()),
        mode_(mode),
        batches_(batches),
        seed_(seed),
        rng_(substream(seed, "batches")) {
    if (objective_.m() == 0) throw ConfigError("oracle over an empty component list");
    if (batches_.value == 0 || batches_.grad_x == 0 || batches_.grad_y == 0) {
      throw ConfigError("batch sizes must be positive");
    }
  }

  static OracleSet deterministic(const ObjectiveSpec& spec) {
    return OracleSet(EmpiricalObjective({spec}), OracleMode::Deterministic, {}, 0);
  }

  static OracleSet deterministic(EmpiricalObjective objective) {
    return OracleSet(std::move(objective), OracleMode::Deterministic, {}, 0);
  }

  /// F(x, y).
  double value(const Vector& x, const Vector& y) {
    ++counters_.value_calls;
    if (mode_ == OracleMode::Deterministic) {
      counters_.component_evals += objective_.m();
      return eval_value(exact_, x, y);
    }
    return batch_mean<double>(
        batches_.value, x, y, 0.0, [](const ObjectiveSpec& c, const Vector& a, const Vector& b) { return c.value(a, b); },
        [this](double v) { detail::check_finite(exact_, v); });
  }

  /// G_y(x, y).
  Vector grad_y(const Vector& x, const Vector& y) {
    ++counters_.grad_y_calls;
    if (mode_ == OracleMode::Deterministic) {
      counters_.component_evals += objective_.m();
      return eval_grad_y(exact_, x, y);
    }
    return batch_mean<Vector>(
        batches_.grad_y, x, y, Vector::Zero(exact_.dim_y),
        [](const ObjectiveSpec& c, const Vector& a, const Vector& b) { return c.grad_y(a, b); },
        [this](const Vector& g) { detail::check_finite(exact_, g); });
  }

  /// G_x(x, y).
  Vector grad_x(const Vector& x, const Vector& y) {
    if (!has_grad_x()) throw ConfigError(exact_.name + ": no x-gradient oracle");
    ++counters_.grad_x_calls;
    if (mode_ == OracleMode::Deterministic) {
      counters_.component_evals += objective_.m();
      return eval_grad_x(exact_, x, y);
    }
    return batch_mean<Vector>(
        batches_.grad_x, x, y, Vector::Zero(exact_.dim_x),
        [](const ObjectiveSpec& c, const Vector& a, const Vector& b) { return c.grad_x(a, b); },
        [this](const Vector& g) { detail::check_finite(exact_, g); });
  }

  bool has_grad_x() const { return static_cast<bool>(exact_.grad_x); }

  /// The exact objective f = mean of the components.
  const ObjectiveSpec& exact() const { return exact_; }
  const EmpiricalObjective& objective() const { return objective_; }
  OracleMode mode() const { return mode_; }
  const BatchSizes& batches() const { return batches_; }
  std::uint64_t seed() const { return seed_; }
  const OracleCounters& counters() const { return counters_; }
  const CounterRng& rng() const { return rng_; }

 private:
  // When the batch is larger than m, every component is evaluated once and the
  // sampled indices sum cached results; the output is identical either way.
  template <typename T, typename Eval, typename Check>
  T batch_mean(std::size_t batch, const Vector& x, const Vector& y, T zero, Eval eval, Check check) {
    detail::check_dims(exact_, x, y);
    detail::check_domain(exact_, x, y);
    const std::size_t m = objective_.m();
    T sum = zero;
    if (batch > m) {
      std::vector<T> cache;
      cache.reserve(m);
      for (const auto& c : objective_.components) cache.push_back(eval(c, x, y));
      counters_.component_evals += m;
      for (std::size_t k = 0; k < batch; ++k) sum += cache[rng_.index(m)];
    } else {
      for (std::size_t k = 0; k < batch; ++k) sum += eval(objective_.components[rng_.index(m)], x, y);
      counters_.component_evals += batch;
    }
    T mean = sum / static_cast<double>(batch);
    check(mean);
    return mean;
  }

  EmpiricalObjective objective_;
  ObjectiveSpec exact_;
  OracleMode mode_;
  BatchSizes batches_;
  std::uint64_t seed_;
  CounterRng rng_;
  OracleCounters counters_;
};

inline double stochastic_value(OracleSet& o, const Vector& x, const Vector& y) { return o.value(x, y); }
inline Vector stochastic_grad_y(OracleSet& o, const Vector& x, const Vector& y) { return o.grad_y(x, y); }
inline Vector stochastic_grad_x(OracleSet& o, const Vector& x, const Vector& y) { return o.grad_x(x, y); }

/// Parse helper shared by CLI and tests: a vector from a list of doubles.
inline Vector make_vector(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

}  // namespace greedymax
