#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "greedymax/core.hpp"

namespace greedymax {

/// Worst-case hyperparameters for the annealed greedy algorithm, with the two
/// sanity inequalities they are supposed to satisfy. Values are kept real
/// (no rounding) so they can be compared against an independent evaluation.
struct TheoreticalParams {
  double b = 0.0;
  double L = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double omega = 0.0;
  double tau1 = 0.0;

  double nu = 0.0;            // per-oracle-call failure probability
  double r_max = 0.0;         // max consecutive rejections
  double I = 0.0;             // outer iteration cap
  double eta = 0.0;           // step size
  double J = 0.0;             // inner iteration cap
  double eps_hat1 = 0.0;      // oracle accuracy target
  double batch_value = 0.0;   // b0
  double batch_grad_y = 0.0;  // by
  double L1 = 0.0;            // value-Lipschitz constant sqrt(2 L b)

  bool nu_bound_holds = false;    // nu <= (1/10) (2 J I + 2 (r_max 8b/delta + 1))^-1
  bool r_max_bound_holds = false; // r_max >= (4/omega) log(100 I / omega)
};

namespace detail {

inline double checked(int item, const char* name, double v) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw TuningError(item, std::string(name) + " is nonpositive or non-finite (" + std::to_string(v) + ")");
  }
  return v;
}

}  // namespace detail

/// Evaluate the eight parameter formulas in dependency order
/// nu -> r_max -> I -> eta -> J -> eps_hat1 -> b0 -> by.
///
/// Bracket grouping (the typeset formulas are ambiguous):
///   nu    = (1/10) * [ 320 b (L+1) / eps^2 * ( tau1 log(128/omega^2)
///             + (2048 b / (omega delta)) * log^2((100/omega)(tau1+1)(8b/delta+1)) + 1 ) ]^-2
///   r_max = (128/omega) * log^2( (100/omega)(tau1+1)(8b/delta+1) + log(1/nu) )
inline TheoreticalParams theoretical_params(double b, double L, double eps, double delta, double omega, double tau1) {
  for (double v : {b, L, eps, delta, omega, tau1}) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError("theoretical_params: all inputs must be positive and finite");
  }
  if (eps > 1.0) throw ConfigError("theoretical_params: requires 0 < eps <= 1");

  TheoreticalParams p;
  p.b = b;
  p.L = L;
  p.epsilon = eps;
  p.delta = delta;
  p.omega = omega;
  p.tau1 = tau1;

  const double anneal_arg = (100.0 / omega) * (tau1 + 1.0) * (8.0 * b / delta + 1.0);
  const double log_anneal = std::log(anneal_arg);
  const double bracket = tau1 * std::log(128.0 / (omega * omega)) +
                         (2048.0 * b / (omega * delta)) * log_anneal * log_anneal + 1.0;
  const double base = 320.0 * b * (L + 1.0) / (eps * eps) * bracket;
  p.nu = detail::checked(1, "nu", 0.1 / (base * base));

  const double log_r = std::log(anneal_arg + std::log(1.0 / p.nu));
  p.r_max = detail::checked(2, "r_max", (128.0 / omega) * log_r * log_r);

  p.I = detail::checked(3, "I", tau1 * std::log(p.r_max / p.nu) + 8.0 * p.r_max * b / delta + 1.0);
  p.eta = detail::checked(4, "eta", std::min(1.0 / (10.0 * L), 1.0 / (8.0 * L * p.I)));
  p.J = detail::checked(5, "J", 16.0 * b / (p.eta * eps * eps));
  p.eps_hat1 = detail::checked(6, "eps_hat1", std::min({eps, p.eta * L, delta / 8.0}));

  p.L1 = std::sqrt(2.0 * L * b);
  const double log_inv_nu = std::log(1.0 / p.nu);
  const double scale = 140.0 * 140.0 * log_inv_nu / (p.eps_hat1 * p.eps_hat1);
  p.batch_value = detail::checked(7, "batch_value", scale * b * b);
  p.batch_grad_y = detail::checked(8, "batch_grad_y", scale * p.L1 * p.L1);

  p.nu_bound_holds = p.nu <= 0.1 / (2.0 * p.J * p.I + 2.0 * (p.r_max * 8.0 * b / delta + 1.0));
  p.r_max_bound_holds = p.r_max >= (4.0 / omega) * std::log(100.0 * p.I / omega);
  return p;
}

/// Same, reading b and L from an objective. Refuses unbounded objectives and unknown L.
inline TheoreticalParams theoretical_params(const ObjectiveSpec& obj, double eps, double delta, double omega,
                                            double tau1) {
  if (!obj.bound_b) throw TuningError(0, obj.name + " is unbounded; theoretical parameters need a finite b");
  if (!obj.lip_grad_L) throw TuningError(0, obj.name + " has no gradient-Lipschitz constant");
  return theoretical_params(*obj.bound_b, *obj.lip_grad_L, eps, delta, omega, tau1);
}

/// Smallest batch sizes meeting the oracle concentration bound for a given
/// accuracy eps_hat1 and failure probability nu: b0 = 140^2 b^2 log(1/nu) / eps_hat1^2,
/// by = 140^2 L1^2 log(1/nu) / eps_hat1^2, rounded up.
struct ConcentrationBatches {
  std::size_t value = 0;
  std::size_t grad_y = 0;
};

inline ConcentrationBatches concentration_batch_sizes(double b, double L1, double eps_hat1, double nu) {
  if (!(b >= 0.0) || !(L1 >= 0.0) || !(eps_hat1 > 0.0) || !(nu > 0.0 && nu < 1.0)) {
    throw ConfigError("concentration_batch_sizes: invalid inputs");
  }
  const double scale = 140.0 * 140.0 * std::log(1.0 / nu) / (eps_hat1 * eps_hat1);
  return {static_cast<std::size_t>(std::max(1.0, std::ceil(scale * b * b))),
          static_cast<std::size_t>(std::max(1.0, std::ceil(scale * L1 * L1)))};
}

/// Empirical b and L over a region. Both are lower bounds on the true constants.
struct SmoothnessEstimate {
  double b_hat = 0.0;
  double L_hat = 0.0;
  bool is_estimate = true;
};

/// b_hat = max |f| over n uniform samples. L_hat = max ||grad f(p) - grad f(q)|| / ||p - q||
/// over n pairs; half the pairs are uniform in the region, half are local
/// perturbations (1% of the region width) that resolve curvature peaks.
inline SmoothnessEstimate estimate_smoothness(const ObjectiveSpec& obj, const Box& region_x, const Box& region_y,
                                              std::size_t n_samples, std::uint64_t seed = 0) {
  if (n_samples < 2) throw ConfigError("estimate_smoothness: need at least 2 samples");
  if (region_x.dim() != obj.dim_x || region_y.dim() != obj.dim_y) {
    throw ConfigError("estimate_smoothness: region dimension mismatch");
  }
  const Vector width = (Vector(obj.dim_x + obj.dim_y) << region_x.hi - region_x.lo, region_y.hi - region_y.lo).finished();
  if (!(width.array() > 0.0).any()) throw ConfigError("estimate_smoothness: degenerate region");

  CounterRng rng = substream(seed, "smoothness");
  const auto full_grad = [&obj](const Vector& x, const Vector& y) {
    const Gradients g = eval_grads(obj, x, y);
    return (Vector(obj.dim_x + obj.dim_y) << g.x, g.y).finished();
  };

  SmoothnessEstimate est;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const Vector px = region_x.sample(rng);
    const Vector py = region_y.sample(rng);
    est.b_hat = std::max(est.b_hat, std::abs(eval_value(obj, px, py)));

    Vector qx, qy;
    if (k % 2 == 0) {
      qx = region_x.sample(rng);
      qy = region_y.sample(rng);
    } else {
      qx = px;
      qy = py;
      for (int i = 0; i < obj.dim_x; ++i) qx[i] += 0.01 * (region_x.hi[i] - region_x.lo[i]) * (2.0 * rng.uniform() - 1.0);
      for (int i = 0; i < obj.dim_y; ++i) qy[i] += 0.01 * (region_y.hi[i] - region_y.lo[i]) * (2.0 * rng.uniform() - 1.0);
      qx = region_x.project(qx);
      qy = region_y.project(qy);
    }
    const double dist = std::sqrt((px - qx).squaredNorm() + (py - qy).squaredNorm());
    if (dist <= 0.0) continue;
    est.L_hat = std::max(est.L_hat, (full_grad(px, py) - full_grad(qx, qy)).norm() / dist);
  }
  return est;
}

}  // namespace greedymax
