// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "greedymax/greedymax.hpp"

using namespace greedymax;

namespace {

Vector v1(double a) { return make_vector({a}); }

constexpr int kSeeds = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RunConfig greedy_protocol(std::uint64_t seed) {
  RunConfig c;
  c.epsilon = 0.05;
  c.delta = 0.05;
  c.eta = 0.05;
  c.r_max = 50;
  c.max_outer_iters = 5000;
  c.proposal = ProposalSpec::gaussian(0.25);
  c.accept = AcceptRule::deterministic();
  c.seed = seed;
  c.x0 = v1(5.5);
  c.y0 = v1(5.5);
  return c;
}

RunConfig compact_protocol(std::uint64_t seed) {
  RunConfig c;
  c.epsilon = 0.06;
  c.delta = 0.06;
  c.eta = 0.2;
  c.r_max = 5;
  c.max_outer_iters = 5000;
  c.proposal = ProposalSpec::projected_gradient_noise(1.0);
  c.seed = seed;
  c.x0 = v1(0.4);
  c.y0 = v1(0.4);
  return c;
}

// Shared runs, computed once.
struct Runs {
  std::vector<RunRecord> f1, f3, compact;
};

Runs& runs() {
  static Runs r = [] {
    Runs out;
    for (std::uint64_t s = 1; s <= kSeeds; ++s) {
      OracleSet o1 = OracleSet::deterministic(make_function("F1"));
      RunConfig c1 = greedy_protocol(s);
      c1.inner_cap = 100000;  // F1 is unbounded in y-space
      out.f1.push_back(run(o1, c1));
      OracleSet o3 = OracleSet::deterministic(make_function("F3"));
      out.f3.push_back(run(o3, greedy_protocol(s)));
      OracleSet ob = OracleSet::deterministic(make_function("BilinearCompact"));
      out.compact.push_back(run_compact(ob, compact_protocol(s)));
    }
    return out;
  }();
  return r;
}

double dist(const RunRecord& r) { return std::hypot(r.x_star[0], r.y_star[0]); }

Outcome criterion1() {
  int hit = 0;
  for (const auto& r : runs().f1) hit += dist(r) <= 0.2;
  const double frac = static_cast<double>(hit) / kSeeds;
  return {frac >= 0.9, fmt("F1 greedy: %.0f/20 seeds within 0.2 of origin (fraction %.2f, need >= 0.90)", hit, frac)};
}

Outcome criterion2() {
  int hit = 0;
  for (const auto& r : runs().f3) hit += dist(r) <= 0.3;
  const double frac = static_cast<double>(hit) / kSeeds;
  return {frac >= 0.8, fmt("F3 greedy: %.0f/20 seeds within 0.3 of origin (fraction %.2f, need >= 0.80)", hit, frac)};
}

Outcome criterion3() {
  OracleSet o = OracleSet::deterministic(make_function("F1"));
  const Trajectory t = run_gda(o, v1(5.5), v1(5.5), 0.05, 1, 200);
  // M = 1.1 I + N with N nilpotent, so M^t = 1.1^t I + t 1.1^(t-1) N.
  Eigen::Matrix2d n;
  n << 0.2, -0.2, 0.2, -0.2;
  const Eigen::Vector2d z0(5.5, 5.5);
  double worst = 0.0;
  for (int k = 0; k <= 50 && k < static_cast<int>(t.size()); ++k) {
    const Eigen::Vector2d z = std::pow(1.1, k) * z0 + k * std::pow(1.1, k - 1) * (n * z0);
    worst = std::max({worst, std::abs(t.xs[k][0] - z[0]) / std::abs(z[0]), std::abs(t.ys[k][0] - z[1]) / std::abs(z[1])});
  }
  int first = -1;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t.norm(k) > 1e3) {
      first = static_cast<int>(k);
      break;
    }
  }
  const bool pass = first >= 0 && first <= 200 && worst <= 1e-10;
  return {pass, fmt("GDA on F1: ||z_t|| > 1e3 first at t=%.0f (need <= 200); max rel err vs closed form over t<=50 = %.2e",
                    first, worst)};
}

Outcome criterion4() {
  OracleSet o = OracleSet::deterministic(make_function("F2"));
  const Trajectory eg = run_eg(o, v1(1), v1(1), 0.05, 2000);
  const Trajectory gda = run_gda(o, v1(1), v1(1), 0.05, 1, 2000);
  const double eg_n = eg.norm(eg.size() - 1), gda_n = gda.norm(gda.size() - 1);
  RunConfig c = greedy_protocol(1);
  c.x0 = v1(1);
  c.y0 = v1(1);
  c.inner_cap = 1000;
  c.max_outer_iters = 1;
  OracleSet g = OracleSet::deterministic(make_function("F2"));
  const RunRecord rec = run(g, c);
  const bool hit_cap = rec.rows[0].inner_status == AscentStatus::HitCap;
  const double y_norm = rec.rows[0].proposed_y.norm();
  const bool pass = eg_n <= 0.05 && gda_n <= 0.05 && hit_cap && y_norm > 10;
  return {pass, fmt("F2: EG ||z_2000|| = %.2e, GDA ||z_2000|| = %.2e (need <= 0.05); greedy first ascent ||y|| = %.3g",
                    eg_n, gda_n, y_norm) +
                    (hit_cap ? " with hit_cap" : " without hit_cap")};
}

Outcome criterion5() {
  int hit = 0;
  bool cross = true;
  for (const auto& r : runs().compact) {
    if (std::abs(r.x_star[0]) <= 0.1) {
      ++hit;
      cross = cross && crosscheck_bilinear_global(r, 0.1);
    }
  }
  const double frac = static_cast<double>(hit) / kSeeds;
  return {frac >= 0.8 && cross,
          fmt("compact bilinear: %.0f/20 seeds with |x*| <= 0.1 (fraction %.2f, need >= 0.80); cross-check ", hit, frac) +
              (cross ? "consistent" : "inconsistent")};
}

Outcome criterion6() {
  const auto fam = make_sine_family(64, 2, 2, 1.0, 6);
  const auto exact = fam.mean_spec();
  OracleSet o = OracleSet::deterministic(fam);
  const double eta = 0.1, eps = 0.05;
  const std::size_t cap = default_inner_cap(exact, eta, eps);
  CounterRng rng = substream(6, "starts");
  std::size_t worst = 0;
  bool converged = true;
  for (int k = 0; k < 100; ++k) {
    const Vector x = Box::cube(2, -5, 5).sample(rng);
    const Vector y = Box::cube(2, -5, 5).sample(rng);
    const AscentPath p = ascend(o, x, y, eps, eta, 100 * cap);
    worst = std::max(worst, p.steps());
    converged = converged && p.status == AscentStatus::Converged;
  }
  return {worst <= cap && converged,
          fmt("sine family ascent: max steps %.0f over 100 starts, cap ceil(16b/(eta eps'^2)) = %.0f", worst, cap)};
}

Outcome criterion7() {
  std::size_t segments = 0, failed = 0;
  std::string rates;
  for (const char* name : {"F1", "F3"}) {
    const auto obj = make_function(name);
    const auto& set = std::string(name) == "F1" ? runs().f1 : runs().f3;
    double rate_factor = 1.0 - 2.0 * 0.05 * *obj.lip_grad_L;
    for (const auto& r : set) {
      for (const auto& p : r.paths) {
        const auto check = verify_increasing_path(obj, p, (1.0 - 2.0 * p.eta * *obj.lip_grad_L) * p.eps_prime);
        segments += check.margins.size();
        for (double m : check.margins) failed += m < 0.0;
      }
    }
    rates += std::string(" ") + name + fmt(" (1-2 eta L) = %.4f;", rate_factor);
  }
  return {failed == 0, fmt("increasing-path check: %.0f of %.0f recorded segments below rate;", failed, segments) + rates};
}

Outcome criterion8() {
  std::size_t accepted = 0, violations = 0;
  const auto scan = [&](const std::vector<RunRecord>& set, double delta) {
    for (const auto& r : set) {
      double last = std::numeric_limits<double>::infinity();
      for (const auto& row : r.rows) {
        if (!row.accepted) continue;
        ++accepted;
        if (!(row.f_new <= last - delta / 4.0)) ++violations;
        last = row.f_new;
      }
    }
  };
  scan(runs().f1, 0.05);
  scan(runs().f3, 0.05);
  scan(runs().compact, 0.06);
  return {violations == 0, fmt("non-cycling: %.0f violations over %.0f accepted iterations", violations, accepted)};
}

Outcome criterion9() {
  const auto fam = make_sine_family(256, 2, 2, 1.0, 9);
  const double nu = 0.01, eps_hat1 = 1.0;
  const auto batches = concentration_batch_sizes(1.0, std::sqrt(2.0), eps_hat1, nu);
  OracleSet o(fam, OracleMode::Stochastic, {batches.value, 1, batches.grad_y}, 9);
  const auto r = concentration_test(o, o.exact(), make_vector({0.3, -0.7}), make_vector({1.1, 0.2}), eps_hat1, 10000);
  return {r.value_exceedance <= nu && r.grad_exceedance <= nu,
          fmt("oracle concentration (batches %.0f / %.0f): value exceedance %.4f", batches.value, batches.grad_y,
              r.value_exceedance) +
              fmt(", gradient exceedance %.4f over 10^4 draws (need <= 0.01)", r.grad_exceedance)};
}

Outcome criterion10() {
  std::ifstream in(std::string(GREEDYMAX_TEST_DATA) + "/tuning_golden.json");
  const auto g = nlohmann::json::parse(in);
  double worst = 0.0;
  bool bounds = true;
  int n = 0;
  for (const auto& c : g["cases"]) {
    const auto p = theoretical_params(c["b"], c["L"], c["eps"], c["delta"], c["omega"], c["tau1"]);
    const auto& v = c["values"];
    const std::pair<double, double> pairs[] = {{p.nu, v["nu"]},       {p.r_max, v["r_max"]},
                                               {p.I, v["I"]},         {p.eta, v["eta"]},
                                               {p.J, v["J"]},         {p.eps_hat1, v["eps_hat1"]},
                                               {p.L1, v["L1"]},       {p.batch_value, v["batch_value"]},
                                               {p.batch_grad_y, v["batch_grad_y"]}};
    for (const auto& [got, want] : pairs) worst = std::max(worst, std::abs(got - want) / std::abs(want));
    bounds = bounds && p.nu_bound_holds && p.r_max_bound_holds;
    ++n;
  }
  return {n == 9 && worst <= 1e-12 && bounds,
          fmt("tuning: %.0f grid points, max rel err vs golden %.2e, inequalities ", n, worst) +
              (bounds ? "hold everywhere" : "violated")};
}

Outcome criterion11() {
  const auto f1 = make_function("F1");
  CertifyOptions opt;
  opt.proposal = ProposalSpec::gaussian(0.25);
  opt.delta = 0.05;
  opt.omega = 0.1;
  opt.eta = 0.05;
  opt.n_trials = 400;
  int certified = 0;
  double worst_lo = 1.0, worst_norm = 0.0;
  for (std::size_t k = 0; k < runs().f1.size(); ++k) {
    opt.seed = k + 1;
    const auto& r = runs().f1[k];
    const Certificate c = certify(f1, r.x_star, r.y_star, r.eps_star, opt);
    const bool ok = c.verdict == Verdict::Certified && c.stationarity_norm <= 0.05 && c.ci.lo >= 0.9;
    certified += ok;
    worst_lo = std::min(worst_lo, c.ci.lo);
    worst_norm = std::max(worst_norm, c.stationarity_norm);
  }
  opt.seed = 1000;
  const Certificate ridge = certify(f1, v1(3), v1(6), 0.05, opt);
  const bool refuted = ridge.verdict == Verdict::Refuted;
  return {certified == kSeeds && refuted,
          fmt("certify: %.0f/20 F1 outputs certified (min CI lower %.3f, max stationarity %.2e); ", certified, worst_lo,
              worst_norm) +
              "ridge (3,6) " + std::string(to_string(ridge.verdict))};
}

Outcome criterion12() {
  int same = 0;
  for (std::uint64_t s = 1; s <= kSeeds; ++s) {
    OracleSet o = OracleSet::deterministic(make_function("F1"));
    RunConfig c = greedy_protocol(s);
    c.inner_cap = 100000;
    same += to_csv(run(o, c)) == to_csv(runs().f1[s - 1]);
  }
  return {same == kSeeds, fmt("determinism: %.0f/20 repeated F1 runs produce byte-identical CSV", same)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2,  criterion3,  criterion4,
                                                          criterion5, criterion6,  criterion7,  criterion8,
                                                          criterion9, criterion10, criterion11, criterion12};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
