// Command-line front end: run, sweep, tune, certify, plot.
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "greedymax/greedymax.hpp"

namespace fs = std::filesystem;
using namespace greedymax;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

fs::path out_dir() {
  const char* env = std::getenv("GREEDYMAX_OUT_DIR");
  fs::path dir = env && *env ? fs::path(env) : fs::current_path();
  fs::create_directories(dir);
  return dir;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

// Flags that mirror config keys. Strings keep "unset" distinguishable from defaults.
struct RunFlags {
  std::string config, function, algorithm, init, proposal, accept;
  double eta = 0, eps = 0, delta = 0, omega = 0, lipschitz = 0, lr = 0;
  std::size_t rmax = 0, budget = 0, inner_cap = 0, k = 0, iters = 0;
  std::uint64_t seed = 0;
  bool remeasure = false, abort_on_cap = false;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts["config"] = app->add_option("--config", config, "flat JSON config file");
    opts["function"] = app->add_option("--function", function, "objective name");
    opts["algorithm"] = app->add_option("--algorithm", algorithm, "greedy | greedy-compact | gda | omd | eg");
    opts["init"] = app->add_option("--init", init, "initial point, x coordinates then y");
    opts["eta"] = app->add_option("--eta", eta, "ascent step size");
    opts["eps"] = app->add_option("--eps", eps, "stationarity tolerance");
    opts["delta"] = app->add_option("--delta", delta, "sufficient-decrease margin");
    opts["omega"] = app->add_option("--omega", omega, "failure probability");
    opts["rmax"] = app->add_option("--rmax", rmax, "rejection limit");
    opts["budget"] = app->add_option("--budget", budget, "outer iteration budget");
    opts["inner_cap"] = app->add_option("--inner-cap", inner_cap, "ascent step cap");
    opts["proposal"] = app->add_option("--proposal", proposal, "kind:parameter, e.g. gaussian:0.25");
    opts["accept"] = app->add_option("--accept", accept, "deterministic | annealed:tau | fixed-rate:p");
    opts["lipschitz"] = app->add_option("--lipschitz", lipschitz, "gradient Lipschitz constant for eps corrections");
    opts["seed"] = app->add_option("--seed", seed, "64-bit seed");
    opts["lr"] = app->add_option("--lr", lr, "baseline learning rate");
    opts["k"] = app->add_option("--k", k, "GDA max-player steps per iteration");
    opts["iters"] = app->add_option("--iters", iters, "baseline iterations");
    opts["remeasure"] = app->add_flag("--remeasure", remeasure, "refresh f_old after rejections");
    opts["abort_on_cap"] = app->add_flag("--abort-on-cap", abort_on_cap, "stop when an ascent hits its cap");
  }

  bool given(const std::string& key) const { return opts.at(key)->count() > 0; }

  Settings resolve() const {
    Settings s;
    if (given("config")) s = settings_from_json(read_json_file(config));
    if (given("function")) s.function = function;
    if (given("algorithm")) s.algorithm = algorithm;
    if (given("init")) s.init = parse_list(init);
    if (given("eta")) s.eta = eta;
    if (given("eps")) s.eps = eps;
    if (given("delta")) s.delta = delta;
    if (given("omega")) s.omega = omega;
    if (given("rmax")) s.rmax = rmax;
    if (given("budget")) s.budget = budget;
    if (given("inner_cap")) s.inner_cap = inner_cap;
    if (given("proposal")) s.proposal = proposal;
    if (given("accept")) s.accept = accept;
    if (given("lipschitz")) s.lipschitz = lipschitz;
    if (given("seed")) s.seed = seed;
    if (given("lr")) s.lr = lr;
    if (given("k")) s.k = k;
    if (given("iters")) s.iters = iters;
    if (given("remeasure")) s.remeasure = remeasure;
    if (given("abort_on_cap")) s.abort_on_cap = abort_on_cap;
    if (s.function.empty()) throw ConfigError("--function is required");
    if (s.init.empty()) throw ConfigError("--init is required");
    return s;
  }
};

struct Outcome {
  Json summary;
  std::string csv;
};

Outcome execute(Settings s) {
  const ObjectiveSpec obj = make_function(s.function);
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  OracleSet o = OracleSet::deterministic(obj);
  if (s.algorithm == "greedy" || s.algorithm == "greedy-compact") {
    RunConfig c = make_run_config(s, obj);
    c.record_paths = false;
    if (s.algorithm == "greedy-compact" && !s.proposal.starts_with("projected")) {
      c.proposal = ProposalSpec::projected_gradient_noise(1.0);
      s.proposal = "projected-gradnoise:1";
    }
    const RunRecord rec = s.algorithm == "greedy" ? run(o, c) : run_compact(o, c);
    return {summary_json(rec, s, elapsed()), to_csv(rec)};
  }
  if (s.init.size() != static_cast<std::size_t>(obj.dim_x + obj.dim_y)) throw ConfigError("init has the wrong size");
  const Vector x0 = Eigen::Map<const Vector>(s.init.data(), obj.dim_x);
  const Vector y0 = Eigen::Map<const Vector>(s.init.data() + obj.dim_x, obj.dim_y);
  Trajectory t;
  std::size_t inner = 1;
  if (s.algorithm == "gda") {
    t = run_gda(o, x0, y0, s.lr, s.k, s.iters);
    inner = s.k;
  } else if (s.algorithm == "omd") {
    t = run_omd(o, x0, y0, s.lr, s.iters);
  } else if (s.algorithm == "eg") {
    t = run_eg(o, x0, y0, s.lr, s.iters);
    inner = 2;
  } else {
    throw ConfigError("unknown algorithm '" + s.algorithm + "'");
  }
  std::ostringstream csv;
  write_csv(csv, trajectory_rows(obj, t, inner), obj.dim_x, obj.dim_y);
  return {summary_json(obj, t, o.counters(), s, elapsed()), csv.str()};
}

int cmd_run(const RunFlags& flags, const std::string& name) {
  const Settings s = flags.resolve();
  const Outcome out = execute(s);
  const fs::path dir = out_dir();
  const std::string stem = name.empty() ? s.function + "_" + s.algorithm + "_seed" + std::to_string(s.seed) : name;
  write_file(dir / (stem + ".csv"), out.csv);
  write_file(dir / (stem + ".json"), out.summary.dump(2) + "\n");
  std::cout << out.summary.dump(2) << "\n";
  return kExitOk;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (text.empty()) return seeds;
  for (const auto& part : split(text, ',')) {
    const auto range = split(part, '-');
    if (range.size() == 1) {
      seeds.push_back(parse_count(range[0]));
    } else if (range.size() == 2) {
      const auto a = parse_count(range[0]);
      const auto b = parse_count(range[1]);
      if (b < a) throw ConfigError("bad seed range '" + part + "'");
      for (auto v = a; v <= b; ++v) seeds.push_back(v);
    } else {
      throw ConfigError("bad seed list '" + text + "'");
    }
  }
  return seeds;
}

int cmd_sweep(const RunFlags& flags, const std::string& seed_text, const std::vector<std::string>& grid_specs,
              double radius, const std::string& target_text, unsigned workers) {
  const Settings base = flags.resolve();
  const auto seeds = parse_seeds(seed_text);
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");

  // Cartesian product over key=v1|v2|... axes.
  std::vector<Json> cells{Json::object()};
  for (const auto& spec : grid_specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("grid axis must look like key=v1|v2, got '" + spec + "'");
    const std::string key = spec.substr(0, eq);
    const auto values = split(spec.substr(eq + 1), '|');
    std::vector<Json> next;
    for (const auto& cell : cells) {
      for (const auto& v : values) {
        if (v.empty()) continue;
        Json c = cell;
        const bool textual = key == "function" || key == "algorithm" || key == "proposal" || key == "accept" ||
                             key == "init";
        const Json parsed = textual ? Json(v) : Json::parse(v, nullptr, false);
        c[key] = parsed.is_discarded() ? Json(v) : parsed;
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  if (cells.empty()) throw ConfigError("sweep grid is empty");

  const auto target = target_text.empty() ? std::vector<double>{} : parse_list(target_text);
  struct Job {
    std::size_t cell;
    std::uint64_t seed;
    Settings settings;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Json merged = to_json(base);
    for (const auto& [k, v] : cells[c].items()) merged[k] = v;
    Settings s = settings_from_json(merged);
    for (auto seed : seeds) {
      s.seed = seed;
      jobs.push_back({c, seed, s});
    }
  }

  const fs::path dir = out_dir();
  std::vector<Json> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j; (j = next++) < jobs.size();) {
      try {
        const Outcome out = execute(jobs[j].settings);
        write_file(dir / ("sweep_cell" + std::to_string(jobs[j].cell) + "_seed" + std::to_string(jobs[j].seed) + ".csv"),
                   out.csv);
        results[j] = out.summary;
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!errors[j].empty()) throw ConfigError("seed " + std::to_string(jobs[j].seed) + ": " + errors[j]);
  }

  Json aggregate{{"seeds", seeds}, {"radius", radius}, {"cells", Json::array()}};
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Json runs = Json::array();
    std::size_t successes = 0;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].cell != c) continue;
      const Json& r = results[j];
      auto point = r["x_star"].get<std::vector<double>>();
      for (double v : r["y_star"].get<std::vector<double>>()) point.push_back(v);
      double dist2 = 0.0;
      for (std::size_t i = 0; i < point.size(); ++i) {
        const double t = i < target.size() ? target[i] : 0.0;
        dist2 += (point[i] - t) * (point[i] - t);
      }
      const bool success = std::sqrt(dist2) <= radius;
      successes += success;
      runs.push_back({{"seed", jobs[j].seed},
                      {"x_star", r["x_star"]},
                      {"y_star", r["y_star"]},
                      {"termination", r["termination"]},
                      {"iterations", r["iterations"]},
                      {"success", success}});
    }
    aggregate["cells"].push_back({{"params", cells[c]},
                                  {"runs", runs},
                                  {"success_fraction", static_cast<double>(successes) / seeds.size()}});
  }
  write_file(dir / "sweep.json", aggregate.dump(2) + "\n");
  std::cout << aggregate.dump(2) << "\n";
  return kExitOk;
}

int cmd_tune(const std::string& function, double b, double L, double eps, double delta, double omega, double tau1) {
  const TheoreticalParams p = function.empty() ? theoretical_params(b, L, eps, delta, omega, tau1)
                                               : theoretical_params(make_function(function), eps, delta, omega, tau1);
  std::cout << tuning_json(p).dump(2) << "\n";
  return kExitOk;
}

int cmd_certify(const std::string& summary_path, CertifyOptions opt, const CLI::App& app, const std::string& proposal) {
  const Json summary = read_json_file(summary_path);
  try {
    const ObjectiveSpec obj = make_function(summary.at("objective").get<std::string>());
    const Vector x = vector_from_json(summary.at("x_star"));
    const Vector y = vector_from_json(summary.at("y_star"));
    const Json& cfg = summary.at("config");
    const double eps_star = summary.contains("eps_star") ? summary["eps_star"].get<double>() : cfg.at("eps").get<double>();
    if (app.count("--proposal") == 0) opt.proposal = parse_proposal(cfg.at("proposal").get<std::string>());
    else opt.proposal = parse_proposal(proposal);
    if (app.count("--delta") == 0) opt.delta = cfg.at("delta").get<double>();
    if (app.count("--eta") == 0) opt.eta = cfg.at("eta").get<double>();
    if (app.count("--omega") == 0) opt.omega = cfg.at("omega").get<double>();
    if (app.count("--seed") == 0) opt.seed = cfg.at("seed").get<std::uint64_t>();
    const Certificate c = certify(obj, x, y, eps_star, opt);
    const Json j = certificate_json(c);
    write_file(out_dir() / (fs::path(summary_path).stem().string() + ".cert.json"), j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed summary: ") + e.what());
  }
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::vector<std::string>& labels, const std::string& output,
             const std::string& target_text, bool no_target) {
  if (csvs.empty()) throw ConfigError("plot needs at least one CSV");
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < csvs.size(); ++i) {
    std::ifstream in(csvs[i]);
    if (!in) throw ConfigError("cannot open " + csvs[i]);
    const std::string label = i < labels.size() ? labels[i] : fs::path(csvs[i]).stem().string();
    series.push_back(plot_series(label, parse_csv(in)));
  }
  std::optional<std::pair<double, double>> target;
  if (!no_target) {
    const auto t = target_text.empty() ? std::vector<double>{0.0, 0.0} : parse_list(target_text);
    if (t.size() != 2) throw ConfigError("target needs two coordinates");
    target = std::pair{t[0], t[1]};
  }
  const fs::path path = fs::path(output).is_absolute() ? fs::path(output) : out_dir() / output;
  write_file(path, render_svg(series, target));
  std::cout << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy max-player min-max optimization"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run one solver and write trajectory CSV + summary JSON");
  RunFlags run_flags;
  run_flags.attach(run_cmd);
  std::string run_name;
  run_cmd->add_option("--name", run_name, "output file stem");

  auto* sweep_cmd = app.add_subcommand("sweep", "run seeds x grid and aggregate");
  RunFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string seed_text = "1-20";
  std::vector<std::string> grid;
  double radius = 0.2;
  std::string sweep_target;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  sweep_cmd->add_option("--seeds", seed_text, "seed list, e.g. 1-20 or 1,5,9");
  sweep_cmd->add_option("--grid", grid, "axis key=v1|v2 (repeatable)");
  sweep_cmd->add_option("--radius", radius, "success radius around the target");
  sweep_cmd->add_option("--target", sweep_target, "target point (default origin)");
  sweep_cmd->add_option("--workers", workers, "worker threads");

  auto* tune_cmd = app.add_subcommand("tune", "evaluate theoretical parameters");
  std::string tune_function;
  double tb = 1, tL = 1, teps = 0.1, tdelta = 0.1, tomega = 0.5, ttau = 1;
  tune_cmd->add_option("--function", tune_function, "take b and L from a bundled objective");
  tune_cmd->add_option("--b", tb, "bound on |f|");
  tune_cmd->add_option("--L", tL, "gradient Lipschitz constant");
  tune_cmd->add_option("--eps", teps, "epsilon");
  tune_cmd->add_option("--delta", tdelta, "delta");
  tune_cmd->add_option("--omega", tomega, "omega");
  tune_cmd->add_option("--tau1", ttau, "annealing temperature");

  auto* cert_cmd = app.add_subcommand("certify", "certify the final point of a run summary");
  std::string summary_path, cert_proposal;
  CertifyOptions cert_opt;
  cert_cmd->add_option("summary", summary_path, "summary JSON written by run")->required();
  cert_cmd->add_option("--trials", cert_opt.n_trials, "Monte Carlo trials");
  cert_cmd->add_option("--omega", cert_opt.omega, "omega");
  cert_cmd->add_option("--delta", cert_opt.delta, "delta");
  cert_cmd->add_option("--eta", cert_opt.eta, "ascent step size");
  cert_cmd->add_option("--proposal", cert_proposal, "proposal kind:parameter");
  cert_cmd->add_option("--seed", cert_opt.seed, "seed");

  auto* plot_cmd = app.add_subcommand("plot", "render trajectory CSVs as an SVG phase plot");
  std::vector<std::string> plot_csvs, plot_labels;
  std::string plot_out = "plot.svg", plot_target;
  bool no_target = false;
  plot_cmd->add_option("csv", plot_csvs, "trajectory CSV files")->required();
  plot_cmd->add_option("--labels", plot_labels, "legend labels");
  plot_cmd->add_option("--out", plot_out, "output SVG path");
  plot_cmd->add_option("--target", plot_target, "star marker position (default 0,0)");
  plot_cmd->add_flag("--no-target", no_target, "omit the star marker");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, run_name);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, seed_text, grid, radius, sweep_target, workers);
    if (*tune_cmd) return cmd_tune(tune_function, tb, tL, teps, tdelta, tomega, ttau);
    if (*cert_cmd) return cmd_certify(summary_path, cert_opt, *cert_cmd, cert_proposal);
    if (*plot_cmd) return cmd_plot(plot_csvs, plot_labels, plot_out, plot_target, no_target);
  } catch (const ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TuningError& e) {
    std::cerr << "error[numerical]: item " << e.item() << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const EvaluationError& e) {
    std::cerr << "error[numerical]: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
