#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "superspine/config.hpp"
#include "superspine/errors.hpp"
#include "superspine/experiment.hpp"
#include "superspine/io.hpp"
#include "superspine/numerics.hpp"
#include "superspine/sampler.hpp"
#include "superspine/stats.hpp"
#include "superspine/verify.hpp"
#include "superspine/williams.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace superspine::cli {

namespace {

// Files produced by one run, by name; written to disk only at the end.
using Outputs = std::map<std::string, std::string>;

struct Invocation {
  std::string command;
  json options = json::object();    // subcommand options that shape the outputs
  std::optional<ExperimentConfig> config;
  std::string out;                  // explicit --out, empty if absent
  unsigned workers = 0;
};

enum SampleRole : std::uint64_t { kSampleForward = 1, kSampleConditioned, kSampleWilliams };

fs::path output_dir(const Invocation& inv) {
  if (!inv.out.empty()) return inv.out;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  if (inv.config) return inv.config->output_dir;
  return "superspine-out";
}

json extinction_json(double t) { return std::isfinite(t) ? json(t) : json(nullptr); }

int do_solve(const Invocation& inv, Outputs& files) {
  const auto& cfg = *inv.config;
  Model model = build_model(cfg);
  std::ostringstream table;
  model.profile.write(table);
  files["profile.txt"] = table.str();

  json rows = json::array();
  const Point x0 = model.mu.atoms.front().x;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    if (t < model.profile.t_min() || t > model.profile.t_max()) continue;
    rows.push_back({{"t", t}, {"v", model.profile.v(t, x0)}, {"w", model.profile.w(t, x0)},
                    {"extinction_cdf", extinction_cdf(model.profile, model.mu, t)}});
  }
  json summary = {{"mode", model.homogeneous ? "closed_form" : "grid"},
                  {"t_min", model.profile.t_min()},
                  {"t_max", std::isfinite(model.profile.t_max()) ? json(model.profile.t_max()) : json(nullptr)},
                  {"at_first_atom", rows}};
  if (!model.homogeneous) {
    const auto& d = model.profile.diagnostics;
    summary["diagnostics"] = {{"max_w_discrepancy", d.max_w_discrepancy},
                              {"tie_break_points", d.tie_break_points},
                              {"bootstrap_time", d.bootstrap_time},
                              {"substeps", d.substeps},
                              {"step_halvings", d.step_halvings}};
  }
  files["profile_summary.json"] = summary.dump(2) + "\n";
  return kPass;
}

int do_sample(const Invocation& inv, Outputs& files) {
  const auto& cfg = *inv.config;
  const std::string kind = inv.options.at("kind");
  const double h = inv.options.at("h");
  const std::size_t n = inv.options.at("replicas");
  const int dim = cfg.motion.dim;
  const double dt = cfg.grid.dt;
  if (!(h > 0.0)) throw ConfigError("--h must be positive");
  if (kind != "williams" && std::abs(h / dt - std::round(h / dt)) > 1e-9 * std::max(1.0, h / dt)) {
    throw ConfigError("--h must be a multiple of grid.dt for " + kind + " sampling");
  }

  Model model = build_model(cfg, kind != "forward");
  auto stepper = model.stepper();
  std::vector<std::string> traj_rows(n), event_rows(n), spine_rows(n);
  std::vector<json> info(n);

  parallel_for(n, inv.workers, [&](std::size_t i) {
    std::ostringstream traj;
    if (kind == "forward") {
      Rng rng = Rng::derived(cfg.seed, {kSampleForward, i});
      auto rec = sample_superprocess(stepper, model.mu, uniform_times(dt, steps_in(h, dt, "--h")), rng);
      write_trajectory_rows(traj, i, rec, dim);
      info[i] = {{"extinction_time", extinction_json(rec.extinction_time)}};
    } else if (kind == "conditioned") {
      Rng rng = Rng::derived(cfg.seed, {kSampleConditioned, i});
      auto draw = sample_conditioned_direct(stepper, model.mu, h, cfg.eps, dt, rng, cfg.mc.attempt_budget);
      write_trajectory_rows(traj, i, draw.trajectory, dim);
      info[i] = {{"extinction_time", extinction_json(draw.trajectory.extinction_time)},
                 {"attempts", draw.attempts}};
    } else {
      Rng rng = Rng::derived(cfg.seed, {kSampleWilliams, i});
      auto w = sample_williams(stepper, model.profile, model.mu, h, model.williams, rng);
      write_trajectory_rows(traj, i, w.assembled, dim);
      std::ostringstream ev, sp;
      write_events_rows(ev, i, w.events, dim);
      write_spine_rows(sp, i, w.spine, dim);
      event_rows[i] = ev.str();
      spine_rows[i] = sp.str();
      std::size_t cont = 0, jump = 0;
      for (const auto& e : w.events) (e.kind == ImmigrationKind::continuous ? cont : jump)++;
      info[i] = {{"extinction_time", extinction_json(w.assembled.extinction_time)},
                 {"initial_attempts", w.initial_attempts},
                 {"continuous_events", cont},
                 {"jump_events", jump},
                 {"spine_resamples", w.spine.resamples}};
    }
    traj_rows[i] = traj.str();
  });

  std::ostringstream traj;
  write_trajectory_header(traj, dim);
  for (const auto& r : traj_rows) traj << r;
  files["trajectories.csv"] = traj.str();

  json summary = {{"kind", kind}, {"h", h}, {"replicas", n}, {"replica", info}};
  if (kind == "conditioned") {
    std::size_t attempts = 0;
    for (const auto& r : info) attempts += r.at("attempts").get<std::size_t>();
    summary["acceptance"] = {
        {"attempts", attempts},
        {"observed", static_cast<double>(n) / static_cast<double>(attempts)},
        {"predicted", extinction_cdf(model.profile, model.mu, h + cfg.eps) - extinction_cdf(model.profile, model.mu, h)}};
  }
  if (kind == "williams") {
    std::ostringstream ev, sp;
    write_events_header(ev);
    write_trajectory_header(sp, dim);
    for (std::size_t i = 0; i < n; ++i) {
      ev << event_rows[i];
      sp << spine_rows[i];
    }
    files["events.csv"] = ev.str();
    files["spine.csv"] = sp.str();
    std::size_t attempts = 0;
    for (const auto& r : info) attempts += r.at("initial_attempts").get<std::size_t>();
    summary["acceptance"] = {{"initial_attempts", attempts},
                             {"initial_observed", static_cast<double>(n) / static_cast<double>(attempts)}};
  }
  files["summary.json"] = summary.dump(2) + "\n";
  return kPass;
}

int do_verify(const Invocation& inv, Outputs& files) {
  const auto& cfg = *inv.config;
  std::vector<std::string> tests = inv.options.at("tests");
  if (tests.empty()) tests = cfg.tests.selected.empty() ? default_tests(cfg) : cfg.tests.selected;
  Model model = build_model(cfg);
  VerifyOptions opt;
  opt.workers = inv.workers;
  std::vector<VerificationReport> reports;
  json all = json::array();
  for (const auto& id : tests) {
    reports.push_back(run_test(id, model, cfg.seed, opt));
    all.push_back(to_json(reports.back()));
    std::cerr << id << ": " << (reports.back().infeasible ? "infeasible" : reports.back().pass ? "pass" : "FAIL")
              << '\n';
  }
  files["reports.json"] = all.dump(2) + "\n";
  std::string table = summary_table(reports);
  files["summary.txt"] = table;
  std::cout << table;
  bool infeasible = std::any_of(reports.begin(), reports.end(), [](const auto& r) { return r.infeasible; });
  bool pass = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  return infeasible ? kInfeasible : pass ? kPass : kFail;
}

int do_plot(const Invocation& inv, Outputs& files) {
  const fs::path input = inv.options.at("input").get<std::string>();
  const auto table = read_csv(input / "trajectories.csv");
  const std::size_t c_rep = table.column("replica_id"), c_t = table.column("t"), c_m = table.column("mass");
  std::vector<std::size_t> c_x;
  for (int i = 1;; ++i) {
    auto it = std::find(table.header.begin(), table.header.end(), "x_" + std::to_string(i));
    if (it == table.header.end()) break;
    c_x.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }

  // Per (replica, time): total mass and first/second moments of location.
  struct Cell {
    double mass = 0.0;
    std::vector<double> m1, m2;
  };
  std::map<std::pair<std::size_t, double>, Cell> cells;
  for (const auto& row : table.rows) {
    std::size_t rep = std::stoull(row.at(c_rep));
    double t = std::stod(row.at(c_t)), m = std::stod(row.at(c_m));
    auto& cell = cells[{rep, t}];
    cell.m1.resize(c_x.size());
    cell.m2.resize(c_x.size());
    cell.mass += m;
    if (m <= 0.0) continue;
    for (std::size_t i = 0; i < c_x.size(); ++i) {
      double x = std::stod(row.at(c_x[i]));
      cell.m1[i] += m * x;
      cell.m2[i] += m * x * x;
    }
  }
  std::map<double, std::vector<double>> mass_by_time, disp_by_time;
  for (const auto& [key, cell] : cells) {
    mass_by_time[key.second].push_back(cell.mass);
    if (cell.mass <= 0.0) continue;
    double var = 0.0;
    for (std::size_t i = 0; i < c_x.size(); ++i) {
      double mean = cell.m1[i] / cell.mass;
      var += cell.m2[i] / cell.mass - mean * mean;
    }
    disp_by_time[key.second].push_back(std::sqrt(std::max(var, 0.0)));
  }
  if (mass_by_time.empty()) throw std::runtime_error("trajectories.csv has no rows");

  const double t_end = mass_by_time.rbegin()->first;
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  for (double q : {0.25, 0.5, 0.75, 1.0}) {
    auto it = mass_by_time.lower_bound(q * t_end - 1e-12);
    if (it == mass_by_time.end()) continue;
    std::string label = "t=" + format_number(it->first);
    if (!samples.empty() && samples.back().first == label) continue;
    samples.emplace_back(label, it->second);
  }
  files["mass_ecdf.svg"] = ecdf_svg("Empirical CDF of total mass", samples);

  PlotSeries curve{"median dispersion", {}, {}};
  for (const auto& [t, d] : disp_by_time) {
    curve.x.push_back(t);
    curve.y.push_back(median(d));
  }
  files["dispersion.svg"] = line_svg("Spatial dispersion of the normalized measure", "t", {curve});
  return kPass;
}

int execute(const Invocation& inv) {
  Outputs files;
  int status;
  if (inv.command == "solve") status = do_solve(inv, files);
  else if (inv.command == "sample") status = do_sample(inv, files);
  else if (inv.command == "verify") status = do_verify(inv, files);
  else status = do_plot(inv, files);

  json manifest = {{"command", inv.command}, {"options", inv.options}, {"versions", version_info()}};
  if (inv.config) {
    manifest["config"] = to_json(*inv.config);
    manifest["config_hash"] = config_fingerprint(*inv.config);
    manifest["seed"] = inv.config->seed;
  } else {
    manifest["config"] = nullptr;
    manifest["config_hash"] = nullptr;
    manifest["seed"] = nullptr;
  }
  json outputs = json::object();
  for (const auto& [name, text] : files) outputs[name] = fingerprint(text);
  manifest["outputs"] = outputs;
  manifest["exit_status"] = status;
  files["manifest.json"] = manifest.dump(2) + "\n";

  const fs::path dir = output_dir(inv);
  fs::path staging = dir;
  staging += ".partial";
  fs::remove_all(staging);
  try {
    fs::create_directories(staging);
    for (const auto& [name, text] : files) write_text(staging / name, text);
    fs::remove_all(dir);
    if (dir.has_parent_path()) fs::create_directories(dir.parent_path());
    fs::rename(staging, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  std::cerr << "wrote " << dir.string() << '\n';
  return status;
}

ExperimentConfig load(const std::string& path, const std::vector<std::string>& sets) {
  std::vector<Override> overrides;
  for (const auto& s : sets) overrides.push_back(parse_override(s));
  auto cfg = load_config(path, overrides);
  validate(cfg);
  return cfg;
}

Invocation from_manifest(const std::string& path) {
  json m = json::parse(read_text(path));
  Invocation inv;
  inv.command = m.at("command");
  inv.options = m.at("options");
  if (!m.at("config").is_null()) {
    auto cfg = parse_config(m.at("config").dump());
    validate(cfg);
    if (config_fingerprint(cfg) != m.at("config_hash").get<std::string>()) {
      throw ConfigError("manifest config does not match its recorded hash");
    }
    inv.config = cfg;
  }
  return inv;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Spine decomposition sampler and verifier for superprocesses"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h

  std::string config_path, out, input, manifest_path, kind = "forward";
  std::vector<std::string> sets, tests;
  unsigned workers = 0;
  std::optional<double> h;
  std::size_t replicas = 100;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("config", config_path, "Experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
      sub->add_option("--set", sets, "Override a scalar leaf, e.g. --set grid.dt=0.01");
    }
    sub->add_option("--out", out, std::string("Output directory (overrides ") + kOutputEnv + " and output.dir)");
    sub->add_option("--workers", workers, "Worker threads (0: all cores); results do not depend on it");
  };
  auto* solve = app.add_subcommand("solve", "Tabulate the extinction functionals v and w");
  common(solve, true);
  auto* sample = app.add_subcommand("sample", "Sample trajectories to CSV");
  common(sample, true);
  sample->add_option("--kind", kind, "forward | conditioned | williams")
      ->check(CLI::IsMember({"forward", "conditioned", "williams"}));
  sample->add_option("--h", h, "Conditioning / final time (default: conditioning.h)");
  sample->add_option("--replicas", replicas, "Number of replicas")->check(CLI::PositiveNumber);
  auto* verify = app.add_subcommand("verify", "Run verification tests");
  common(verify, true);
  verify->add_option("--tests", tests, "Tests to run (default: tests.selected or the model's defaults)")
      ->delimiter(',');
  auto* plot = app.add_subcommand("plot", "SVG plots from an existing sample directory");
  common(plot, false);
  plot->add_option("--input", input, "Directory holding trajectories.csv")->required()->check(CLI::ExistingDirectory);
  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest");
  common(rerun, false);
  rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    Invocation inv;
    if (*rerun) {
      inv = from_manifest(manifest_path);
    } else {
      inv.command = app.get_subcommands().front()->get_name();
      if (inv.command != "plot") inv.config = load(config_path, sets);
      if (inv.command == "sample") {
        inv.options = {{"kind", kind}, {"h", h.value_or(inv.config->h)}, {"replicas", replicas}};
      } else if (inv.command == "verify") {
        inv.options = {{"tests", tests}};
      } else if (inv.command == "plot") {
        inv.options = {{"input", input}};
      }
    }
    inv.out = out;
    inv.workers = workers;
    return execute(inv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}

}  // namespace superspine::cli
