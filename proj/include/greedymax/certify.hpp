#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "greedymax/ascent.hpp"
#include "greedymax/core.hpp"
#include "greedymax/minmax.hpp"
#include "greedymax/rng.hpp"

namespace greedymax {

enum class Verdict { Certified, Refuted, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Two-sided Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::size_t successes, std::size_t n, double z = kZ95) {
  if (n == 0) return {0.0, 1.0};
  if (successes > n) throw ConfigError("wilson_interval: successes exceed trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct Stationarity {
  double norm = 0.0;
  bool pass = false;
};

/// ||grad_y f(x, y)|| <= eps. With a y-domain the projected-gradient mapping
/// (1/eta) ||y - P(y + eta grad_y)|| is used instead.
inline Stationarity check_y_stationarity(const ObjectiveSpec& obj, const Vector& x, const Vector& y, double eps,
                                         double eta = 1.0) {
  const Vector g = eval_grad_y(obj, x, y);
  double norm = g.norm();
  if (obj.domain_y) norm = (y - obj.domain_y->project(y + eta * g)).norm() / eta;
  return {norm, norm <= eps};
}

struct RejectionEstimate {
  double estimate = 0.0;
  Interval ci;
  std::size_t n_trials = 0;
  std::size_t n_pass = 0;
};

struct TrialSettings {
  ProposalSpec proposal;
  double eps = 0.05;    // ascent threshold eps' inside each trial
  double delta = 0.05;
  double eta = 0.05;
  std::size_t n_trials = 400;
  std::uint64_t seed = 0;
  std::optional<std::size_t> inner_cap;  // default: ceil(16 b / (eta eps^2)), or 10^5 when unbounded
};

namespace detail {

inline std::size_t trial_cap(const ObjectiveSpec& obj, const TrialSettings& s) {
  if (s.inner_cap) return *s.inner_cap;
  if (obj.bound_b && s.eps > 0.0) return default_inner_cap(obj, s.eta, s.eps);
  return 100000;
}

}  // namespace detail

/// Monte Carlo estimate of Pr[ f(x + Delta, y') >= f(x, y) - delta ], where y' is
/// the max-player's ascent endpoint from y at x + Delta. Trial k draws from its own
/// substream so results do not depend on evaluation order.
inline RejectionEstimate estimate_rejection_probability(const ObjectiveSpec& obj, const Vector& x, const Vector& y,
                                                        const TrialSettings& s) {
  if (!(s.eta > 0.0) || !(s.delta > 0.0) || !(s.eps >= 0.0)) throw ConfigError("invalid trial settings");
  OracleSet o = OracleSet::deterministic(obj);
  const double f0 = eval_value(obj, x, y);
  const std::size_t cap = detail::trial_cap(obj, s);
  Projection proj_y;
  if (obj.domain_y) {
    const Box by = *obj.domain_y;
    proj_y = [by](const Vector& z) { return by.project(z); };
  }
  RejectionEstimate est;
  est.n_trials = s.n_trials;
  for (std::size_t k = 0; k < s.n_trials; ++k) {
    CounterRng rng = substream(s.seed, "certify", k);
    const Vector X = x + propose(s.proposal, o, x, y, rng);
    const AscentPath path =
        proj_y ? ascend_projected(o, X, y, s.eps, s.eta, cap, proj_y) : ascend(o, X, y, s.eps, s.eta, cap);
    if (o.value(X, path.last()) >= f0 - s.delta) ++est.n_pass;
  }
  est.estimate = s.n_trials ? static_cast<double>(est.n_pass) / static_cast<double>(s.n_trials) : 0.0;
  est.ci = wilson_interval(est.n_pass, s.n_trials);
  return est;
}

struct PathCheck {
  bool ok = true;
  std::vector<double> margins;  // per segment: min sampled derivative minus rate
};

/// Checks that f(x, .) increases at least at `rate` along every segment of the
/// path: at each segment start and at 10 interior points.
inline PathCheck verify_increasing_path(const ObjectiveSpec& obj, const AscentPath& path, double rate) {
  PathCheck out;
  for (std::size_t j = 0; j + 1 < path.points.size(); ++j) {
    const Vector& a = path.points[j];
    const Vector v = path.points[j + 1] - a;
    const double len = v.norm();
    if (len == 0.0) continue;
    const Vector u = v / len;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10; ++k) {
      const Vector p = a + (static_cast<double>(k) / 11.0) * v;
      worst = std::min(worst, eval_grad_y(obj, path.x_fixed, p).dot(u));
    }
    out.margins.push_back(worst - rate);
    if (worst < rate) out.ok = false;
  }
  return out;
}

struct Certificate {
  double stationarity_norm = 0.0;
  bool stationary = false;
  double eps_star = 0.0;
  double omega = 0.1;
  double delta = 0.0;
  double rejection_prob_estimate = 0.0;
  Interval ci;
  std::size_t n_trials = 0;
  std::size_t n_pass = 0;
  bool trials_run = false;
  std::size_t paths_passed = 0;
  std::size_t paths_failed = 0;
  Verdict verdict = Verdict::Inconclusive;
  bool conservative = true;  // the trial value lower-bounds the min-player objective
};

struct CertifyOptions {
  ProposalSpec proposal = ProposalSpec::gaussian(0.25);
  double delta = 0.05;
  double omega = 0.1;
  double eta = 0.05;
  std::size_t n_trials = 400;
  std::uint64_t seed = 0;
  std::optional<std::size_t> inner_cap;
};

/// Certificate for (x, y) at tolerance eps_star.
inline Certificate certify(const ObjectiveSpec& obj, const Vector& x, const Vector& y, double eps_star,
                           const CertifyOptions& opt) {
  if (!(opt.omega > 0.0 && opt.omega < 1.0)) throw ConfigError("omega must lie in (0, 1)");
  Certificate c;
  c.eps_star = eps_star;
  c.omega = opt.omega;
  c.delta = opt.delta;
  const Stationarity st = check_y_stationarity(obj, x, y, eps_star, opt.eta);
  c.stationarity_norm = st.norm;
  c.stationary = st.pass;
  if (!st.pass) {
    c.verdict = Verdict::Refuted;
    return c;
  }
  const TrialSettings s{opt.proposal, eps_star, opt.delta, opt.eta, opt.n_trials, opt.seed, opt.inner_cap};
  const RejectionEstimate est = estimate_rejection_probability(obj, x, y, s);
  c.trials_run = true;
  c.rejection_prob_estimate = est.estimate;
  c.ci = est.ci;
  c.n_trials = est.n_trials;
  c.n_pass = est.n_pass;
  const double target = 1.0 - opt.omega;
  if (opt.n_trials < 30) {
    c.verdict = Verdict::Inconclusive;
  } else if (est.ci.lo >= target) {
    c.verdict = Verdict::Certified;
  } else if (est.ci.hi < target) {
    c.verdict = Verdict::Refuted;
  } else {
    c.verdict = Verdict::Inconclusive;
  }
  return c;
}

/// Path rate used for recorded ascents: (1 - 2 eta L) eps'.
inline double increasing_path_rate(double eta, double L, double eps_prime) {
  return (1.0 - 2.0 * eta * L) * eps_prime;
}

/// Certificate for a run's final point, at eps_star = the run's final epsilon.
/// Recorded ascent paths are checked when the objective declares L.
inline Certificate certify(const ObjectiveSpec& obj, const RunRecord& rec, const CertifyOptions& opt) {
  Certificate c = certify(obj, rec.x_star, rec.y_star, rec.eps_star, opt);
  if (obj.lip_grad_L) {
    for (const AscentPath& p : rec.paths) {
      const bool ok = verify_increasing_path(obj, p, increasing_path_rate(p.eta, *obj.lip_grad_L, p.eps_prime)).ok;
      ++(ok ? c.paths_passed : c.paths_failed);
    }
  }
  return c;
}

struct ConcentrationResult {
  double threshold = 0.0;
  std::size_t n_draws = 0;
  double value_exceedance = 0.0;
  double grad_exceedance = 0.0;
};

/// Frequency with which the batch oracles deviate from the exact value and
/// y-gradient at (x, y) by at least eps_hat1 / 10.
inline ConcentrationResult concentration_test(OracleSet& o, const ObjectiveSpec& exact, const Vector& x,
                                              const Vector& y, double eps_hat1, std::size_t n_draws) {
  if (n_draws == 0) throw ConfigError("concentration_test needs at least one draw");
  ConcentrationResult r;
  r.threshold = eps_hat1 / 10.0;
  r.n_draws = n_draws;
  const double f = eval_value(exact, x, y);
  const Vector g = eval_grad_y(exact, x, y);
  std::size_t value_hits = 0;
  std::size_t grad_hits = 0;
  for (std::size_t k = 0; k < n_draws; ++k) {
    if (std::abs(o.value(x, y) - f) >= r.threshold) ++value_hits;
    if ((o.grad_y(x, y) - g).norm() >= r.threshold) ++grad_hits;
  }
  r.value_exceedance = static_cast<double>(value_hits) / static_cast<double>(n_draws);
  r.grad_exceedance = static_cast<double>(grad_hits) / static_cast<double>(n_draws);
  return r;
}

/// On the compact bilinear game every point with |x| <= eps is a global min-max point.
inline bool crosscheck_bilinear_global(const Vector& x_star, double eps) {
  if (x_star.size() != 1) throw ConfigError("bilinear cross-check expects a scalar x");
  return std::abs(x_star[0]) <= eps;
}

inline bool crosscheck_bilinear_global(const RunRecord& rec, double eps) {
  if (rec.objective != "BilinearCompact") {
    throw ConfigError("bilinear cross-check needs a BilinearCompact run, got " + rec.objective);
  }
  return crosscheck_bilinear_global(rec.x_star, eps);
}

/// Certificate at a caller-asserted strict local min-max point with a
/// small-support proposal.
inline Certificate local_minmax_sanity(const ObjectiveSpec& obj, const Vector& x, const Vector& y,
                                       const ProposalSpec& proposal, double eps, double delta, double omega,
                                       std::uint64_t seed = 0, std::size_t n_trials = 400) {
  CertifyOptions opt;
  opt.proposal = proposal;
  opt.delta = delta;
  opt.omega = omega;
  opt.eta = 0.05;
  opt.n_trials = n_trials;
  opt.seed = seed;
  return certify(obj, x, y, eps, opt);
}

}  // namespace greedymax
