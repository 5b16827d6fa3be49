#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greedymax/core.hpp"

namespace greedymax {

enum class AscentStatus { Converged, HitCap, ProjectedFixedPoint };

inline std::string_view to_string(AscentStatus s) {
  switch (s) {
    case AscentStatus::Converged: return "converged";
    case AscentStatus::HitCap: return "hit_cap";
    case AscentStatus::ProjectedFixedPoint: return "projected_fixed_point";
  }
  return "?";
}

inline AscentStatus ascent_status_from_string(std::string_view s) {
  if (s == "converged") return AscentStatus::Converged;
  if (s == "hit_cap") return AscentStatus::HitCap;
  if (s == "projected_fixed_point") return AscentStatus::ProjectedFixedPoint;
  throw ConfigError("unknown ascent status '" + std::string(s) + "'");
}

using Projection = std::function<Vector(const Vector&)>;

/// Every iterate of one max-player ascent at fixed x.
/// `step_grads[j]` is the oracle gradient that moved points[j] to points[j+1].
struct AscentPath {
  Vector x_fixed;
  std::vector<Vector> points;
  std::vector<Vector> step_grads;
  double eta = 0.0;
  double eps_prime = 0.0;
  AscentStatus status = AscentStatus::Converged;
  bool projected = false;
  double final_grad_norm = 0.0;  // stopping statistic at the last point

  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
  const Vector& last() const { return points.back(); }
};

namespace detail {

inline void check_ascent_args(double eps_prime, double eta, std::size_t cap) {
  if (!(eta > 0.0)) throw ConfigError("ascent step size must be positive");
  if (!(eps_prime >= 0.0)) throw ConfigError("ascent threshold must be nonnegative");
  if (cap < 1) throw ConfigError("ascent cap must be at least 1");
}

}  // namespace detail

/// Inner-loop cap ceil(16 b / (eta eps'^2)); only defined for bounded objectives.
inline std::size_t default_inner_cap(const ObjectiveSpec& obj, double eta, double eps_prime) {
  if (!obj.bound_b) throw ConfigError(obj.name + " is unbounded; the ascent needs an explicit cap");
  if (!(eta > 0.0) || !(eps_prime > 0.0)) throw ConfigError("default_inner_cap: eta and eps' must be positive");
  const double j = std::ceil(16.0 * *obj.bound_b / (eta * eps_prime * eps_prime));
  return static_cast<std::size_t>(std::max(1.0, j));
}

/// Stochastic gradient ascent in y until ||G_y|| <= eps_prime, or `cap` steps.
inline AscentPath ascend(OracleSet& o, const Vector& x, const Vector& y0, double eps_prime, double eta,
                         std::size_t cap) {
  detail::check_ascent_args(eps_prime, eta, cap);
  AscentPath path;
  path.x_fixed = x;
  path.eta = eta;
  path.eps_prime = eps_prime;
  path.points.push_back(y0);
  for (;;) {
    const Vector& y = path.points.back();
    Vector g = o.grad_y(x, y);
    path.final_grad_norm = g.norm();
    if (path.final_grad_norm <= eps_prime) {
      path.status = AscentStatus::Converged;
      break;
    }
    if (path.steps() >= cap) {
      path.status = AscentStatus::HitCap;
      break;
    }
    Vector next = y + eta * g;
    if (!next.allFinite()) throw EvaluationError("ascent produced a non-finite iterate");
    path.step_grads.push_back(std::move(g));
    path.points.push_back(std::move(next));
  }
  return path;
}

/// Projected ascent y <- P(y + eta g), stopping when (1/eta) ||y - P(y + eta g)|| <= eps_prime.
inline AscentPath ascend_projected(OracleSet& o, const Vector& x, const Vector& y0, double eps_prime, double eta,
                                   std::size_t cap, const Projection& proj_y) {
  detail::check_ascent_args(eps_prime, eta, cap);
  if (!proj_y) throw ConfigError("ascend_projected: missing projection");
  if ((proj_y(y0) - y0).norm() > 1e-12) throw ConfigError("ascend_projected: y0 is outside the projected set");
  AscentPath path;
  path.x_fixed = x;
  path.eta = eta;
  path.eps_prime = eps_prime;
  path.projected = true;
  path.points.push_back(y0);
  for (;;) {
    const Vector& y = path.points.back();
    Vector g = o.grad_y(x, y);
    Vector next = proj_y(y + eta * g);
    path.final_grad_norm = (y - next).norm() / eta;
    if (path.final_grad_norm <= eps_prime) {
      path.status = AscentStatus::ProjectedFixedPoint;
      break;
    }
    if (path.steps() >= cap) {
      path.status = AscentStatus::HitCap;
      break;
    }
    if (!next.allFinite()) throw EvaluationError("projected ascent produced a non-finite iterate");
    path.step_grads.push_back(std::move(g));
    path.points.push_back(std::move(next));
  }
  return path;
}

/// Directional derivative of f(x, .) along each segment, evaluated at the segment start.
/// Zero-length segments yield an empty entry.
inline std::vector<std::optional<double>> path_directional_derivatives(const ObjectiveSpec& obj,
                                                                       const AscentPath& path) {
  std::vector<std::optional<double>> out;
  for (std::size_t j = 0; j + 1 < path.points.size(); ++j) {
    const Vector v = path.points[j + 1] - path.points[j];
    const double len = v.norm();
    if (len == 0.0) {
      out.emplace_back(std::nullopt);
      continue;
    }
    out.emplace_back(eval_grad_y(obj, path.x_fixed, path.points[j]).dot(v) / len);
  }
  return out;
}

}  // namespace greedymax
