#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "greedymax/ascent.hpp"
#include "greedymax/core.hpp"
#include "greedymax/rng.hpp"

namespace greedymax {

// ---------------------------------------------------------------------------
// Proposals
// ---------------------------------------------------------------------------

enum class ProposalKind {
  Gaussian,                // Delta ~ N(0, variance I)
  StochGrad,               // Delta = -scale G_x(x, y)
  ProjectedGaussian,       // Delta = P_X(x + xi) - x,               xi ~ N(0, variance I)
  ProjectedStochGrad,      // Delta = P_X(x - scale G_x(x, y)) - x
  ProjectedGradientNoise,  // Delta = P_X(G_x(x, y) + xi) - x,      xi ~ N(0, variance I)
};

inline std::string_view to_string(ProposalKind k) {
  switch (k) {
    case ProposalKind::Gaussian: return "gaussian";
    case ProposalKind::StochGrad: return "stochgrad";
    case ProposalKind::ProjectedGaussian: return "projected-gaussian";
    case ProposalKind::ProjectedStochGrad: return "projected-stochgrad";
    case ProposalKind::ProjectedGradientNoise: return "projected-gradnoise";
  }
  return "?";
}

/// The min-player's proposal distribution Q_{x,y}.
struct ProposalSpec {
  ProposalKind kind = ProposalKind::Gaussian;
  double variance = 0.25;
  double scale = 0.0;
  std::optional<Box> box;  // projected kinds only; falls back to the objective's x-domain

  static ProposalSpec gaussian(double variance) { return {ProposalKind::Gaussian, variance, 0.0, std::nullopt}; }
  static ProposalSpec stoch_grad(double scale) { return {ProposalKind::StochGrad, 0.0, scale, std::nullopt}; }
  static ProposalSpec projected_gaussian(double variance, std::optional<Box> box = std::nullopt) {
    return {ProposalKind::ProjectedGaussian, variance, 0.0, std::move(box)};
  }
  static ProposalSpec projected_stoch_grad(double scale, std::optional<Box> box = std::nullopt) {
    return {ProposalKind::ProjectedStochGrad, 0.0, scale, std::move(box)};
  }
  static ProposalSpec projected_gradient_noise(double variance, std::optional<Box> box = std::nullopt) {
    return {ProposalKind::ProjectedGradientNoise, variance, 0.0, std::move(box)};
  }

  bool projected() const {
    return kind == ProposalKind::ProjectedGaussian || kind == ProposalKind::ProjectedStochGrad ||
           kind == ProposalKind::ProjectedGradientNoise;
  }
  bool gradient_based() const {
    return kind == ProposalKind::StochGrad || kind == ProposalKind::ProjectedStochGrad ||
           kind == ProposalKind::ProjectedGradientNoise;
  }
};

/// Draw one min-player update Delta.
inline Vector propose(const ProposalSpec& spec, OracleSet& o, const Vector& x, const Vector& y, CounterRng& rng) {
  if (spec.variance < 0.0) throw ConfigError("proposal variance must be nonnegative");
  if (spec.gradient_based() && !o.has_grad_x()) throw ConfigError("gradient proposal without an x-gradient oracle");
  const auto noise = [&] {
    const double sigma = std::sqrt(spec.variance);
    Vector xi(x.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = sigma * rng.normal();
    return xi;
  };
  const Box* box = nullptr;
  if (spec.projected()) {
    if (spec.box) {
      box = &*spec.box;
    } else if (o.exact().domain_x) {
      box = &*o.exact().domain_x;
    } else {
      throw ConfigError("projected proposal needs a box");
    }
  }
  switch (spec.kind) {
    case ProposalKind::Gaussian: return noise();
    case ProposalKind::StochGrad: return -spec.scale * o.grad_x(x, y);
    case ProposalKind::ProjectedGaussian: return box->project(x + noise()) - x;
    case ProposalKind::ProjectedStochGrad: return box->project(x - spec.scale * o.grad_x(x, y)) - x;
    case ProposalKind::ProjectedGradientNoise: {
      const Vector g = o.grad_x(x, y);
      return box->project(g + noise()) - x;
    }
  }
  throw ConfigError("unknown proposal kind");
}

// ---------------------------------------------------------------------------
// Acceptance
// ---------------------------------------------------------------------------

enum class AcceptMode { Annealed, Deterministic, FixedRate };

inline std::string_view to_string(AcceptMode m) {
  switch (m) {
    case AcceptMode::Annealed: return "annealed";
    case AcceptMode::Deterministic: return "deterministic";
    case AcceptMode::FixedRate: return "fixed-rate";
  }
  return "?";
}

/// How a proposal that fails the sufficient-decrease test may still be accepted.
///  - Annealed: accepted with probability e^{-i/tau1} (e^{-1/tau1} at fixed temperature).
///  - Deterministic: never.
///  - FixedRate(p): iff i is a multiple of round(1/p).
struct AcceptRule {
  AcceptMode mode = AcceptMode::Deterministic;
  double tau1 = 1.0;
  bool fixed_temperature = false;
  double rate = 0.25;
  double threshold_fraction = 0.25;  // accept outright if f_new <= f_old - fraction * delta

  static AcceptRule annealed(double tau1) { return {AcceptMode::Annealed, tau1, false, 0.25, 0.25}; }
  static AcceptRule fixed_temperature_rule(double tau) { return {AcceptMode::Annealed, tau, true, 0.25, 0.25}; }
  static AcceptRule deterministic() { return {}; }
  static AcceptRule fixed_rate(double p) { return {AcceptMode::FixedRate, 1.0, false, p, 0.25}; }

  std::uint64_t period() const {
    return static_cast<std::uint64_t>(std::max(1.0, std::round(1.0 / rate)));
  }
};

inline bool accept_decision(double f_new, double f_old, double delta, std::uint64_t i, const AcceptRule& rule,
                            CounterRng& rng) {
  if (f_new <= f_old - rule.threshold_fraction * delta) return true;
  switch (rule.mode) {
    case AcceptMode::Deterministic: return false;
    case AcceptMode::FixedRate: return i % rule.period() == 0;
    case AcceptMode::Annealed: {
      const double t = rule.fixed_temperature ? 1.0 : static_cast<double>(i);
      const double reject_prob = std::max(0.0, 1.0 - std::exp(-t / rule.tau1));
      return !(rng.uniform() < reject_prob);
    }
  }
  return false;
}

/// Rejection probability of the annealed rule at iteration i (no randomness).
inline double annealed_rejection_probability(std::uint64_t i, double tau1) {
  return std::max(0.0, 1.0 - std::exp(-static_cast<double>(i) / tau1));
}

// ---------------------------------------------------------------------------
// Epsilon schedule
// ---------------------------------------------------------------------------

inline double initial_epsilon(double epsilon) { return epsilon / 2.0; }

inline double epsilon_schedule_step(double eps_i, double eta, double L, bool accepted) {
  const double c = 1.0 - 2.0 * eta * L;
  if (!(c > 0.0)) throw ConfigError("epsilon schedule needs 2 eta L < 1");
  return accepted ? eps_i / (c * c) : eps_i;
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

struct RunConfig {
  double epsilon = 0.05;
  double delta = 0.05;
  double omega = 0.1;
  double eta = 0.05;
  std::size_t r_max = 50;
  std::size_t max_outer_iters = 5000;
  std::optional<std::size_t> inner_cap;  // default: ceil(16 b / (eta eps'^2)) for bounded f
  ProposalSpec proposal;
  AcceptRule accept;
  // Gradient-Lipschitz constant for the (1 - 2 eta L) corrections; empty disables them.
  std::optional<double> lipschitz;
  bool abort_on_inner_cap = false;
  bool remeasure_on_reject = false;
  bool record_paths = true;
  std::uint64_t seed = 0;
  Vector x0;
  Vector y0;
};

enum class Termination { RejectionLimit, Budget, InnerCapAbort };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::RejectionLimit: return "rejection_limit";
    case Termination::Budget: return "budget";
    case Termination::InnerCapAbort: return "inner_cap_abort";
  }
  return "?";
}

inline Termination termination_from_string(std::string_view s) {
  if (s == "rejection_limit") return Termination::RejectionLimit;
  if (s == "budget") return Termination::Budget;
  if (s == "inner_cap_abort") return Termination::InnerCapAbort;
  throw ConfigError("unknown termination '" + std::string(s) + "'");
}

/// One outer iteration. (x, y) is the state after the accept/reject decision.
struct RunRow {
  std::uint64_t iter = 0;
  bool accepted = false;
  std::uint64_t r = 0;
  double eps_i = 0.0;
  double f_old = 0.0;
  double f_new = 0.0;
  std::uint64_t inner_steps = 0;
  AscentStatus inner_status = AscentStatus::Converged;
  Vector x;
  Vector y;
  Vector proposed_x;
  Vector proposed_y;

  friend bool operator==(const RunRow& a, const RunRow& b) {
    const auto same = [](double p, double q) { return p == q || (std::isnan(p) && std::isnan(q)); };
    return a.iter == b.iter && a.accepted == b.accepted && a.r == b.r && same(a.eps_i, b.eps_i) &&
           same(a.f_old, b.f_old) && same(a.f_new, b.f_new) && a.inner_steps == b.inner_steps &&
           a.inner_status == b.inner_status && a.x == b.x && a.y == b.y && a.proposed_x == b.proposed_x &&
           a.proposed_y == b.proposed_y;
  }
};

struct RunCounters {
  std::uint64_t value_calls = 0;
  std::uint64_t grad_y_calls = 0;
  std::uint64_t grad_x_calls = 0;
  std::uint64_t proposal_samples = 0;
  std::uint64_t ascent_calls = 0;
  std::uint64_t component_evals = 0;

  friend bool operator==(const RunCounters&, const RunCounters&) = default;
};

struct RunRecord {
  std::string objective;
  int dim_x = 1;
  int dim_y = 1;
  std::vector<RunRow> rows;
  std::vector<AscentPath> paths;  // one per row when recorded
  Vector x_star;
  Vector y_star;
  double f_star = std::numeric_limits<double>::infinity();
  double eps_star = 0.0;  // epsilon after the last acceptance
  std::size_t acceptances = 0;
  Termination termination = Termination::Budget;
  RunCounters counters;
  bool compact = false;
};

namespace detail {

inline void validate(const RunConfig& c) {
  for (double v : {c.epsilon, c.delta, c.omega, c.eta}) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ConfigError("epsilon, delta, omega and eta must be positive");
  }
  if (c.r_max < 1) throw ConfigError("r_max must be at least 1");
  if (c.max_outer_iters < 1) throw ConfigError("outer iteration budget must be at least 1");
  if (c.inner_cap && *c.inner_cap < 1) throw ConfigError("inner cap must be at least 1");
  if (c.accept.mode == AcceptMode::Annealed && !(c.accept.tau1 > 0.0)) throw ConfigError("tau1 must be positive");
  if (c.accept.mode == AcceptMode::FixedRate && !(c.accept.rate > 0.0 && c.accept.rate <= 1.0)) {
    throw ConfigError("fixed acceptance rate must lie in (0, 1]");
  }
  if (c.lipschitz && !(2.0 * c.eta * *c.lipschitz < 1.0)) throw ConfigError("requires 2 eta L < 1");
}

inline RunCounters counters_delta(const OracleCounters& before, const OracleCounters& after) {
  RunCounters r;
  r.value_calls = after.value_calls - before.value_calls;
  r.grad_y_calls = after.grad_y_calls - before.grad_y_calls;
  r.grad_x_calls = after.grad_x_calls - before.grad_x_calls;
  r.component_evals = after.component_evals - before.component_evals;
  return r;
}

}  // namespace detail

/// The annealed greedy min-max loop.
///
/// Each iteration proposes X = x + Delta, lets the max-player ascend from the
/// current y to an eps'-stationary point Y, measures f_new = F(X, Y) and accepts
/// or rejects (X, Y). f_old starts at +inf so the first proposal is accepted and
/// is only refreshed on acceptance (unless `remeasure_on_reject`). The loop ends
/// after r_max + 1 consecutive rejections or when the budget runs out.
inline RunRecord run(OracleSet& o, const RunConfig& config) {
  detail::validate(config);
  const ObjectiveSpec& obj = o.exact();
  if (config.x0.size() != obj.dim_x || config.y0.size() != obj.dim_y) {
    throw ConfigError("initial point has the wrong dimension");
  }
  if (!config.inner_cap && !obj.bounded()) {
    throw ConfigError(obj.name + " is unbounded; set an explicit inner cap");
  }

  CounterRng proposal_rng = substream(config.seed, "proposal");
  CounterRng accept_rng = substream(config.seed, "acceptance");
  const OracleCounters start = o.counters();
  const double inner_factor = config.lipschitz ? 1.0 / (1.0 - 2.0 * config.eta * *config.lipschitz) : 1.0;

  RunRecord rec;
  rec.objective = obj.name;
  rec.dim_x = obj.dim_x;
  rec.dim_y = obj.dim_y;
  Vector x = config.x0;
  Vector y = config.y0;
  double f_old = std::numeric_limits<double>::infinity();
  double eps = initial_epsilon(config.epsilon);
  std::uint64_t r = 0;
  std::uint64_t i = 0;
  rec.termination = Termination::Budget;

  while (r <= config.r_max && i < config.max_outer_iters) {
    const Vector delta_x = propose(config.proposal, o, x, y, proposal_rng);
    ++rec.counters.proposal_samples;
    const Vector X = x + delta_x;
    const double eps_prime = eps * inner_factor;
    const std::size_t cap = config.inner_cap ? *config.inner_cap : default_inner_cap(obj, config.eta, eps_prime);
    AscentPath path = ascend(o, X, y, eps_prime, config.eta, cap);
    ++rec.counters.ascent_calls;
    const Vector& Y = path.last();
    const double f_new = o.value(X, Y);

    RunRow row;
    row.iter = i;
    row.eps_i = eps;
    row.f_old = f_old;
    row.f_new = f_new;
    row.inner_steps = path.steps();
    row.inner_status = path.status;
    row.proposed_x = X;
    row.proposed_y = Y;

    const bool abort = path.status == AscentStatus::HitCap && config.abort_on_inner_cap;
    row.accepted = !abort && accept_decision(f_new, f_old, config.delta, i, config.accept, accept_rng);
    if (row.accepted) {
      x = X;
      y = Y;
      f_old = f_new;
      r = 0;
      if (config.lipschitz) eps = epsilon_schedule_step(eps, config.eta, *config.lipschitz, true);
      ++rec.acceptances;
    } else {
      ++r;
      if (config.remeasure_on_reject) f_old = o.value(x, y);
    }
    row.r = r;
    row.x = x;
    row.y = y;
    rec.rows.push_back(std::move(row));
    if (config.record_paths) rec.paths.push_back(std::move(path));
    ++i;
    if (abort) {
      rec.termination = Termination::InnerCapAbort;
      break;
    }
  }
  if (r > config.r_max) rec.termination = Termination::RejectionLimit;

  rec.x_star = x;
  rec.y_star = y;
  rec.f_star = f_old;
  rec.eps_star = eps;
  const RunCounters used = detail::counters_delta(start, o.counters());
  rec.counters.value_calls = used.value_calls;
  rec.counters.grad_y_calls = used.grad_y_calls;
  rec.counters.grad_x_calls = used.grad_x_calls;
  rec.counters.component_evals = used.component_evals;
  return rec;
}

/// The compact-domain variant: projected proposals and projected ascent, fixed
/// eps' = eps, f_old re-measured every iteration, and deterministic acceptance
/// with threshold delta / 2.
inline RunRecord run_compact(OracleSet& o, const RunConfig& config, const Projection& proj_x,
                             const Projection& proj_y) {
  detail::validate(config);
  const ObjectiveSpec& obj = o.exact();
  if (!proj_x || !proj_y) throw ConfigError("run_compact needs both projections");
  if (config.x0.size() != obj.dim_x || config.y0.size() != obj.dim_y) {
    throw ConfigError("initial point has the wrong dimension");
  }
  if ((proj_x(config.x0) - config.x0).norm() > 1e-12 || (proj_y(config.y0) - config.y0).norm() > 1e-12) {
    throw ConfigError("initial point lies outside X x Y");
  }
  if (!config.proposal.projected()) throw ConfigError("run_compact needs a projected proposal");
  if (!config.inner_cap && !obj.bounded()) throw ConfigError(obj.name + " is unbounded; set an explicit inner cap");

  const AcceptRule rule{AcceptMode::Deterministic, 1.0, false, 1.0, 0.5};
  CounterRng proposal_rng = substream(config.seed, "proposal");
  CounterRng accept_rng = substream(config.seed, "acceptance");
  const OracleCounters start = o.counters();
  const std::size_t cap = config.inner_cap ? *config.inner_cap : default_inner_cap(obj, config.eta, config.epsilon);

  RunRecord rec;
  rec.objective = obj.name;
  rec.dim_x = obj.dim_x;
  rec.dim_y = obj.dim_y;
  rec.compact = true;
  rec.eps_star = config.epsilon;
  Vector x = config.x0;
  Vector y = config.y0;
  std::uint64_t r = 0;
  std::uint64_t i = 0;
  double f_old = 0.0;

  while (r <= config.r_max && i < config.max_outer_iters) {
    f_old = o.value(x, y);
    const Vector delta_x = propose(config.proposal, o, x, y, proposal_rng);
    ++rec.counters.proposal_samples;
    const Vector X = proj_x(x + delta_x);  // guards against round-off leaving the box
    AscentPath path = ascend_projected(o, X, y, config.epsilon, config.eta, cap, proj_y);
    ++rec.counters.ascent_calls;
    const Vector& Y = path.last();
    const double f_new = o.value(X, Y);

    RunRow row;
    row.iter = i;
    row.eps_i = config.epsilon;
    row.f_old = f_old;
    row.f_new = f_new;
    row.inner_steps = path.steps();
    row.inner_status = path.status;
    row.proposed_x = X;
    row.proposed_y = Y;
    const bool abort = path.status == AscentStatus::HitCap && config.abort_on_inner_cap;
    row.accepted = !abort && accept_decision(f_new, f_old, config.delta, i, rule, accept_rng);
    if (row.accepted) {
      x = X;
      y = Y;
      r = 0;
      ++rec.acceptances;
    } else {
      ++r;
    }
    row.r = r;
    row.x = x;
    row.y = y;
    rec.rows.push_back(std::move(row));
    if (config.record_paths) rec.paths.push_back(std::move(path));
    ++i;
    if (abort) {
      rec.termination = Termination::InnerCapAbort;
      break;
    }
  }
  if (rec.termination != Termination::InnerCapAbort) {
    rec.termination = r > config.r_max ? Termination::RejectionLimit : Termination::Budget;
  }

  rec.x_star = x;
  rec.y_star = y;
  rec.f_star = o.exact().value(x, y);
  const RunCounters used = detail::counters_delta(start, o.counters());
  rec.counters.value_calls = used.value_calls;
  rec.counters.grad_y_calls = used.grad_y_calls;
  rec.counters.grad_x_calls = used.grad_x_calls;
  rec.counters.component_evals = used.component_evals;
  return rec;
}

/// run_compact with the objective's own box domains as projections.
inline RunRecord run_compact(OracleSet& o, const RunConfig& config) {
  const ObjectiveSpec& obj = o.exact();
  if (!obj.domain_x || !obj.domain_y) throw ConfigError(obj.name + " has no compact domain");
  const Box bx = *obj.domain_x;
  const Box by = *obj.domain_y;
  return run_compact(
      o, config, [bx](const Vector& z) { return bx.project(z); }, [by](const Vector& z) { return by.project(z); });
}

}  // namespace greedymax
