#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "greedymax/core.hpp"

namespace greedymax {

enum class TrajectoryStatus { Ok, Diverged };

inline std::string_view to_string(TrajectoryStatus s) { return s == TrajectoryStatus::Ok ? "ok" : "diverged"; }

/// Iterates (x_t, y_t) for t = 0..T. A diverged run stops at the last finite iterate.
struct Trajectory {
  std::string algorithm;
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  TrajectoryStatus status = TrajectoryStatus::Ok;

  std::size_t size() const { return xs.size(); }
  /// ||(x_t, y_t)||
  double norm(std::size_t t) const { return std::sqrt(xs[t].squaredNorm() + ys[t].squaredNorm()); }
};

namespace detail {

inline void check_baseline_args(const ObjectiveSpec& obj, const Vector& x0, const Vector& y0, double lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!obj.grad_x) throw ConfigError(obj.name + " has no x-gradient");
  check_dims(obj, x0, y0);
}

// Appends (x, y) or marks the trajectory diverged. Returns false when the run must stop.
inline bool push_iterate(Trajectory& t, Vector x, Vector y) {
  if (!x.allFinite() || !y.allFinite()) {
    t.status = TrajectoryStatus::Diverged;
    return false;
  }
  t.xs.push_back(std::move(x));
  t.ys.push_back(std::move(y));
  return true;
}

}  // namespace detail

/// Gradient descent-ascent. Each iteration takes k - 1 ascent steps in y, then one
/// simultaneous step x <- x - lr grad_x, y <- y + lr grad_y.
inline Trajectory run_gda(OracleSet& o, const Vector& x0, const Vector& y0, double lr, std::size_t k,
                          std::size_t iters) {
  detail::check_baseline_args(o.exact(), x0, y0, lr);
  if (k < 1) throw ConfigError("GDA needs at least one max-player step");
  Trajectory t{"gda", {x0}, {y0}, TrajectoryStatus::Ok};
  Vector x = x0;
  Vector y = y0;
  try {
    for (std::size_t it = 0; it < iters; ++it) {
      for (std::size_t j = 1; j < k; ++j) {
        y += lr * o.grad_y(x, y);
        if (!y.allFinite()) break;
      }
      if (!y.allFinite()) {
        t.status = TrajectoryStatus::Diverged;
        break;
      }
      const Vector gx = o.grad_x(x, y);
      const Vector gy = o.grad_y(x, y);
      x -= lr * gx;
      y += lr * gy;
      if (!detail::push_iterate(t, x, y)) break;
    }
  } catch (const EvaluationError&) {
    t.status = TrajectoryStatus::Diverged;
  }
  return t;
}

/// Optimistic mirror descent (Euclidean): z_{t+1} = z_t -/+ 2 lr g(z_t) +/- lr g(z_{t-1}),
/// with g(z_{-1}) = g(z_0).
inline Trajectory run_omd(OracleSet& o, const Vector& x0, const Vector& y0, double lr, std::size_t iters) {
  detail::check_baseline_args(o.exact(), x0, y0, lr);
  Trajectory t{"omd", {x0}, {y0}, TrajectoryStatus::Ok};
  Vector x = x0;
  Vector y = y0;
  Vector prev_gx = o.grad_x(x, y);
  Vector prev_gy = o.grad_y(x, y);
  try {
    for (std::size_t it = 0; it < iters; ++it) {
      const Vector gx = it == 0 ? prev_gx : o.grad_x(x, y);
      const Vector gy = it == 0 ? prev_gy : o.grad_y(x, y);
      x += -2.0 * lr * gx + lr * prev_gx;
      y += 2.0 * lr * gy - lr * prev_gy;
      prev_gx = gx;
      prev_gy = gy;
      if (!detail::push_iterate(t, x, y)) break;
    }
  } catch (const EvaluationError&) {
    t.status = TrajectoryStatus::Diverged;
  }
  return t;
}

/// Extragradient: a lookahead step, then the real step with the lookahead's field.
inline Trajectory run_eg(OracleSet& o, const Vector& x0, const Vector& y0, double lr, std::size_t iters) {
  detail::check_baseline_args(o.exact(), x0, y0, lr);
  Trajectory t{"eg", {x0}, {y0}, TrajectoryStatus::Ok};
  Vector x = x0;
  Vector y = y0;
  try {
    for (std::size_t it = 0; it < iters; ++it) {
      const Vector xh = x - lr * o.grad_x(x, y);
      const Vector yh = y + lr * o.grad_y(x, y);
      if (!xh.allFinite() || !yh.allFinite()) {
        t.status = TrajectoryStatus::Diverged;
        break;
      }
      const Vector gx = o.grad_x(xh, yh);
      const Vector gy = o.grad_y(xh, yh);
      x -= lr * gx;
      y += lr * gy;
      if (!detail::push_iterate(t, x, y)) break;
    }
  } catch (const EvaluationError&) {
    t.status = TrajectoryStatus::Diverged;
  }
  return t;
}

}  // namespace greedymax
