#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "greedymax/baselines.hpp"
#include "greedymax/certify.hpp"
#include "greedymax/minmax.hpp"
#include "greedymax/tuning.hpp"

namespace greedymax {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// Shortest round-trip form ("%.17g"); inf and nan spelled as strtod reads them.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view s) {
  const std::string str(s);
  char* end = nullptr;
  const double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size()) throw ConfigError("not a number: '" + str + "'");
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::uint64_t parse_count(std::string_view s) {
  const double v = parse_double(s);
  if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("not a count: '" + std::string(s) + "'");
  return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

inline std::string csv_header(int dim_x, int dim_y) {
  std::string h = "iter,accepted,r,eps_i,f_old,f_new,inner_steps,inner_status";
  for (int i = 1; i <= dim_x; ++i) h += ",x" + std::to_string(i);
  for (int i = 1; i <= dim_y; ++i) h += ",y" + std::to_string(i);
  for (int i = 1; i <= dim_x; ++i) h += ",px" + std::to_string(i);
  for (int i = 1; i <= dim_y; ++i) h += ",py" + std::to_string(i);
  return h;
}

inline void write_csv(std::ostream& os, const std::vector<RunRow>& rows, int dim_x, int dim_y) {
  os << csv_header(dim_x, dim_y) << '\n';
  for (const RunRow& r : rows) {
    os << r.iter << ',' << (r.accepted ? 1 : 0) << ',' << r.r << ',' << format_double(r.eps_i) << ','
       << format_double(r.f_old) << ',' << format_double(r.f_new) << ',' << r.inner_steps << ','
       << to_string(r.inner_status);
    for (const Vector* v : {&r.x, &r.y, &r.proposed_x, &r.proposed_y}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) os << ',' << format_double((*v)[i]);
    }
    os << '\n';
  }
}

inline std::string to_csv(const RunRecord& rec) {
  std::ostringstream os;
  write_csv(os, rec.rows, rec.dim_x, rec.dim_y);
  return os.str();
}

struct ParsedCsv {
  int dim_x = 0;
  int dim_y = 0;
  std::vector<RunRow> rows;
};

inline ParsedCsv parse_csv(std::istream& is) {
  ParsedCsv out;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty trajectory CSV");
  const auto cols = split(line, ',');
  for (const auto& c : cols) {
    if (c.size() > 1 && c[0] == 'x') ++out.dim_x;
    if (c.size() > 1 && c[0] == 'y') ++out.dim_y;
  }
  if (out.dim_x == 0 || out.dim_y == 0 || line != csv_header(out.dim_x, out.dim_y)) {
    throw ConfigError("unrecognized trajectory CSV header");
  }
  const auto read_vec = [](const std::vector<std::string>& f, std::size_t at, int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = parse_double(f[at + i]);
    return v;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != cols.size()) throw ConfigError("trajectory CSV row has the wrong width");
    RunRow r;
    r.iter = parse_count(f[0]);
    r.accepted = parse_count(f[1]) != 0;
    r.r = parse_count(f[2]);
    r.eps_i = parse_double(f[3]);
    r.f_old = parse_double(f[4]);
    r.f_new = parse_double(f[5]);
    r.inner_steps = parse_count(f[6]);
    r.inner_status = ascent_status_from_string(f[7]);
    std::size_t at = 8;
    r.x = read_vec(f, at, out.dim_x);
    at += out.dim_x;
    r.y = read_vec(f, at, out.dim_y);
    at += out.dim_y;
    r.proposed_x = read_vec(f, at, out.dim_x);
    at += out.dim_x;
    r.proposed_y = read_vec(f, at, out.dim_y);
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline ParsedCsv parse_csv(const std::string& text) {
  std::istringstream is(text);
  return parse_csv(is);
}

/// Baseline iterates in the trajectory schema: every step is "accepted";
/// inner_steps is the number of y-gradient steps per iteration.
inline std::vector<RunRow> trajectory_rows(const ObjectiveSpec& obj, const Trajectory& t, std::size_t inner_steps) {
  std::vector<RunRow> rows;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < t.size(); ++i) {
    RunRow r;
    r.iter = i;
    r.accepted = true;
    r.f_new = obj.value(t.xs[i], t.ys[i]);  // may overflow on diverged runs
    r.f_old = i == 0 ? r.f_new : prev;
    prev = r.f_new;
    r.inner_steps = i == 0 ? 0 : inner_steps;
    r.x = r.proposed_x = t.xs[i];
    r.y = r.proposed_y = t.ys[i];
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Settings (flat JSON config, also the target of CLI flags)
// ---------------------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

struct Settings {
  std::string function;
  std::string algorithm = "greedy";  // greedy | greedy-compact | gda | omd | eg
  std::vector<double> init;          // x coordinates then y coordinates
  double eta = 0.05;
  double eps = 0.05;
  double delta = 0.05;
  double omega = 0.1;
  std::size_t rmax = 50;
  std::size_t budget = 5000;
  std::optional<std::size_t> inner_cap;
  std::string proposal = "gaussian:0.25";
  std::string accept = "deterministic";
  std::optional<double> lipschitz;
  bool remeasure = false;
  bool abort_on_cap = false;
  std::uint64_t seed = 0;
  double lr = 0.05;
  std::size_t k = 1;
  std::size_t iters = 2000;
};

inline ProposalSpec parse_proposal(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError("proposal must look like kind:parameter, got '" + text + "'");
  const double p = parse_double(parts[1]);
  if (parts[0] == "gaussian") return ProposalSpec::gaussian(p);
  if (parts[0] == "stochgrad") return ProposalSpec::stoch_grad(p);
  if (parts[0] == "projected-gaussian") return ProposalSpec::projected_gaussian(p);
  if (parts[0] == "projected-stochgrad") return ProposalSpec::projected_stoch_grad(p);
  if (parts[0] == "projected-gradnoise") return ProposalSpec::projected_gradient_noise(p);
  throw ConfigError("unknown proposal kind '" + parts[0] + "'");
}

inline AcceptRule parse_accept(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts[0] == "deterministic" && parts.size() == 1) return AcceptRule::deterministic();
  if (parts.size() == 2) {
    const double p = parse_double(parts[1]);
    if (parts[0] == "annealed") return AcceptRule::annealed(p);
    if (parts[0] == "fixed-temperature") return AcceptRule::fixed_temperature_rule(p);
    if (parts[0] == "fixed-rate") return AcceptRule::fixed_rate(p);
  }
  throw ConfigError("unknown acceptance rule '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_double(s));
  return out;
}

inline Json to_json(const Settings& s) {
  Json j{{"schema_version", kSchemaVersion},
         {"function", s.function},
         {"algorithm", s.algorithm},
         {"init", s.init},
         {"eta", s.eta},
         {"eps", s.eps},
         {"delta", s.delta},
         {"omega", s.omega},
         {"rmax", s.rmax},
         {"budget", s.budget},
         {"proposal", s.proposal},
         {"accept", s.accept},
         {"remeasure", s.remeasure},
         {"abort_on_cap", s.abort_on_cap},
         {"seed", s.seed},
         {"lr", s.lr},
         {"k", s.k},
         {"iters", s.iters}};
  j["inner_cap"] = s.inner_cap ? Json(*s.inner_cap) : Json(nullptr);
  j["lipschitz"] = s.lipschitz ? Json(*s.lipschitz) : Json(nullptr);
  return j;
}

/// Reads a flat JSON config. Unknown keys are errors so typos do not pass silently.
inline Settings settings_from_json(const Json& j, Settings s = {}) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion) {
    throw ConfigError("config needs schema_version " + std::to_string(kSchemaVersion));
  }
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "schema_version") continue;
      else if (key == "function") s.function = v.get<std::string>();
      else if (key == "algorithm") s.algorithm = v.get<std::string>();
      else if (key == "init") s.init = v.is_string() ? parse_list(v.get<std::string>()) : v.get<std::vector<double>>();
      else if (key == "eta") s.eta = v.get<double>();
      else if (key == "eps") s.eps = v.get<double>();
      else if (key == "delta") s.delta = v.get<double>();
      else if (key == "omega") s.omega = v.get<double>();
      else if (key == "rmax") s.rmax = v.get<std::size_t>();
      else if (key == "budget") s.budget = v.get<std::size_t>();
      else if (key == "inner_cap") s.inner_cap = v.is_null() ? std::nullopt : std::optional(v.get<std::size_t>());
      else if (key == "proposal") s.proposal = v.get<std::string>();
      else if (key == "accept") s.accept = v.get<std::string>();
      else if (key == "lipschitz") s.lipschitz = v.is_null() ? std::nullopt : std::optional(v.get<double>());
      else if (key == "remeasure") s.remeasure = v.get<bool>();
      else if (key == "abort_on_cap") s.abort_on_cap = v.get<bool>();
      else if (key == "seed") s.seed = v.get<std::uint64_t>();
      else if (key == "lr") s.lr = v.get<double>();
      else if (key == "k") s.k = v.get<std::size_t>();
      else if (key == "iters") s.iters = v.get<std::size_t>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return s;
}

/// Builds a RunConfig for the greedy algorithms.
inline RunConfig make_run_config(const Settings& s, const ObjectiveSpec& obj) {
  if (s.init.size() != static_cast<std::size_t>(obj.dim_x + obj.dim_y)) {
    throw ConfigError("init needs " + std::to_string(obj.dim_x + obj.dim_y) + " coordinates");
  }
  RunConfig c;
  c.epsilon = s.eps;
  c.delta = s.delta;
  c.omega = s.omega;
  c.eta = s.eta;
  c.r_max = s.rmax;
  c.max_outer_iters = s.budget;
  c.inner_cap = s.inner_cap;
  c.proposal = parse_proposal(s.proposal);
  c.accept = parse_accept(s.accept);
  c.lipschitz = s.lipschitz;
  c.abort_on_inner_cap = s.abort_on_cap;
  c.remeasure_on_reject = s.remeasure;
  c.seed = s.seed;
  c.x0 = Eigen::Map<const Vector>(s.init.data(), obj.dim_x);
  c.y0 = Eigen::Map<const Vector>(s.init.data() + obj.dim_x, obj.dim_y);
  return c;
}

// ---------------------------------------------------------------------------
// Summaries and certificates
// ---------------------------------------------------------------------------

inline Json vector_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vector vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// JSON has no inf/nan; those are stored as null.
inline Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json summary_json(const RunRecord& rec, const Settings& s, double wall_time_s) {
  return Json{{"objective", rec.objective},
              {"algorithm", s.algorithm},
              {"x_star", vector_json(rec.x_star)},
              {"y_star", vector_json(rec.y_star)},
              {"f_star", number_json(rec.f_star)},
              {"eps_star", rec.eps_star},
              {"termination", to_string(rec.termination)},
              {"iterations", rec.rows.size()},
              {"acceptances", rec.acceptances},
              {"counters",
               {{"value_calls", rec.counters.value_calls},
                {"grad_y_calls", rec.counters.grad_y_calls},
                {"grad_x_calls", rec.counters.grad_x_calls},
                {"proposal_samples", rec.counters.proposal_samples},
                {"ascent_calls", rec.counters.ascent_calls},
                {"component_evals", rec.counters.component_evals}}},
              {"config", to_json(s)},
              {"seed", s.seed},
              {"wall_time_s", wall_time_s}};
}

inline Json summary_json(const ObjectiveSpec& obj, const Trajectory& t, const OracleCounters& counters,
                         const Settings& s, double wall_time_s) {
  const std::size_t last = t.size() - 1;
  return Json{{"objective", obj.name},
              {"algorithm", s.algorithm},
              {"x_star", vector_json(t.xs[last])},
              {"y_star", vector_json(t.ys[last])},
              {"f_star", number_json(obj.value(t.xs[last], t.ys[last]))},
              {"termination", to_string(t.status)},
              {"iterations", last},
              {"counters",
               {{"value_calls", counters.value_calls},
                {"grad_y_calls", counters.grad_y_calls},
                {"grad_x_calls", counters.grad_x_calls},
                {"component_evals", counters.component_evals}}},
              {"config", to_json(s)},
              {"seed", s.seed},
              {"wall_time_s", wall_time_s}};
}

inline Json certificate_json(const Certificate& c) {
  return Json{{"stationarity_norm", c.stationarity_norm},
              {"stationary", c.stationary},
              {"eps_star", c.eps_star},
              {"omega", c.omega},
              {"delta", c.delta},
              {"rejection_prob_estimate", c.rejection_prob_estimate},
              {"ci", {c.ci.lo, c.ci.hi}},
              {"n_trials", c.n_trials},
              {"n_pass", c.n_pass},
              {"trials_run", c.trials_run},
              {"path_checks", {{"passed", c.paths_passed}, {"failed", c.paths_failed}}},
              {"verdict", to_string(c.verdict)},
              {"conservative", c.conservative}};
}

inline Json tuning_json(const TheoreticalParams& p) {
  return Json{{"b", p.b},
              {"L", p.L},
              {"eps", p.epsilon},
              {"delta", p.delta},
              {"omega", p.omega},
              {"tau1", p.tau1},
              {"nu", p.nu},
              {"r_max", p.r_max},
              {"I", p.I},
              {"eta", p.eta},
              {"J", p.J},
              {"eps_hat1", p.eps_hat1},
              {"batch_value", p.batch_value},
              {"batch_grad_y", p.batch_grad_y},
              {"L1", p.L1},
              {"nu_bound_holds", p.nu_bound_holds},
              {"r_max_bound_holds", p.r_max_bound_holds}};
}

// ---------------------------------------------------------------------------
// SVG phase plot
// ---------------------------------------------------------------------------

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

inline PlotSeries plot_series(std::string label, const ParsedCsv& csv) {
  if (csv.dim_x != 1 || csv.dim_y != 1) throw ConfigError("plot needs dim_x = dim_y = 1");
  PlotSeries s{std::move(label), {}, {}};
  for (const RunRow& r : csv.rows) {
    s.xs.push_back(r.x[0]);
    s.ys.push_back(r.y[0]);
  }
  return s;
}

/// Trajectories in the (x, y) plane with start and end markers and a star at `target`.
inline std::string render_svg(const std::vector<PlotSeries>& series, std::optional<std::pair<double, double>> target) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr double W = 640, H = 480, M = 40;
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
  const auto grow = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    lo_x = std::min(lo_x, x), hi_x = std::max(hi_x, x), lo_y = std::min(lo_y, y), hi_y = std::max(hi_y, y);
  };
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) grow(s.xs[i], s.ys[i]);
  }
  if (target) grow(target->first, target->second);
  if (!std::isfinite(lo_x)) lo_x = lo_y = -1, hi_x = hi_y = 1;
  if (hi_x - lo_x < 1e-12) lo_x -= 1, hi_x += 1;
  if (hi_y - lo_y < 1e-12) lo_y -= 1, hi_y += 1;
  const auto px = [&](double x) { return M + (x - lo_x) / (hi_x - lo_x) * (W - 2 * M); };
  const auto py = [&](double y) { return H - M - (y - lo_y) / (hi_y - lo_y) * (H - 2 * M); };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\" text-anchor=\"middle\">x [" << num(lo_x)
     << ", " << num(hi_x) << "]</text>\n";
  os << "<text x=\"12\" y=\"" << H / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
     << H / 2 << ")\">y [" << num(lo_y) << ", " << num(hi_y) << "]</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
      os << (i ? " " : "") << num(px(s.xs[i])) << ',' << num(py(s.ys[i]));
    }
    os << "\"/>\n";
    if (!s.xs.empty()) {
      os << "<circle cx=\"" << num(px(s.xs.front())) << "\" cy=\"" << num(py(s.ys.front()))
         << "\" r=\"4\" fill=\"white\" stroke=\"" << color << "\"/>\n";
      os << "<circle cx=\"" << num(px(s.xs.back())) << "\" cy=\"" << num(py(s.ys.back())) << "\" r=\"4\" fill=\""
         << color << "\"/>\n";
    }
  }
  if (target) {
    const double cx = px(target->first), cy = py(target->second);
    os << "<polygon fill=\"gold\" stroke=\"black\" points=\"";
    for (int i = 0; i < 10; ++i) {
      const double rad = i % 2 ? 3.5 : 9.0;
      const double a = -std::numbers::pi / 2 + i * std::numbers::pi / 5;
      os << (i ? " " : "") << num(cx + rad * std::cos(a)) << ',' << num(cy + rad * std::sin(a));
    }
    os << "\"/>\n";
  }
  if (series.size() > 1) {
    for (std::size_t k = 0; k < series.size(); ++k) {
      const double y = M + 14 + 16 * static_cast<double>(k);
      os << "<line x1=\"" << W - M - 120 << "\" y1=\"" << y - 4 << "\" x2=\"" << W - M - 100 << "\" y2=\"" << y - 4
         << "\" stroke=\"" << kColors[k % std::size(kColors)] << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << W - M - 95 << "\" y=\"" << y << "\" font-size=\"12\">" << series[k].label << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace greedymax
