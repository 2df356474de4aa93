#include "superspine/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "superspine/errors.hpp"
#include "superspine/numerics.hpp"
#include "superspine/spine.hpp"
#include "superspine/stats.hpp"
#include "superspine/transition.hpp"

namespace superspine {

namespace {

// Stream roles; every replica draws from Rng::derived(seed, {role, group, index}).
enum Role : std::uint64_t {
  kCsbpParticle = 101,
  kCsbpExact,
  kMartingale,
  kSpinePath,
  kDirect,
  kWilliams,
  kWilliamsHalf,
  kNullA,
  kNullB,
  kEnergy,
  kMixture,
  kForward,
  kFkLeft,
  kFkRight,
  kFlowPaths,
  kConcentration,
  kZForward,
  kZOracle,
};

constexpr double kKsLevel = 0.001;
constexpr double kNullLevel = 0.05;
constexpr double kNullRate = 0.25;

template <class R, class F>
std::vector<R> replicate(std::size_t n, unsigned workers, F&& body) {
  std::vector<R> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = body(i); });
  return out;
}

VerificationReport make_report(const std::string& id, const Model& model) {
  VerificationReport r;
  r.test_id = id;
  r.model_fingerprint = config_fingerprint(model.config);
  return r;
}

bool within_sigma(double value, double target, double se, double k = 4.0) {
  return std::abs(value - target) <= k * se;
}

std::vector<double> positive_part(const std::vector<double>& xs) {
  std::vector<double> out;
  for (double x : xs)
    if (x > 0.0) out.push_back(x);
  return out;
}

std::size_t zeros(const std::vector<double>& xs) {
  return static_cast<std::size_t>(std::count(xs.begin(), xs.end(), 0.0));
}

// State after running mu forward to t on the sampler grid.
ParticleMeasure run_to(const SuperprocessStepper& stepper, const ParticleMeasure& mu, double t,
                       double dt, Rng& rng) {
  ParticleMeasure state = mu;
  std::size_t steps = steps_in(t, dt, "observation time");
  for (std::size_t k = 0; k < steps && !state.empty(); ++k) stepper.advance(state, dt, rng);
  return state;
}

// Masses at `times` (ascending, on the grid) along one forward path.
std::vector<double> forward_masses(const SuperprocessStepper& stepper, const ParticleMeasure& mu,
                                   const std::vector<double>& times, double dt, Rng& rng) {
  std::vector<double> out;
  ParticleMeasure state = mu;
  std::size_t done = 0;
  for (double t : times) {
    std::size_t target = steps_in(t, dt, "observation time");
    for (; done < target; ++done) {
      if (state.empty()) {
        done = target;
        break;
      }
      stepper.advance(state, dt, rng);
    }
    out.push_back(state.total_mass());
  }
  return out;
}

Point first_atom(const Model& model) { return model.mu.atoms.front().x; }

ParticleMeasure unit_at(const Point& x) { return ParticleMeasure::dirac(x, 1.0); }

// Spatial table u(k dt, .) of the mild equation started from g, k = 0..steps.
std::vector<GridField> mild_table(const Model& model, const ScalarField& g, double dt,
                                  std::size_t steps) {
  MildSolver solver(model.mechanism, model.motion, model.grid, model.solver);
  GridField u(model.grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = solver.outside(i) ? 0.0 : g(solver.points()[i]);
  std::vector<GridField> table{u};
  for (std::size_t k = 0; k < steps; ++k) {
    solver.advance(u, dt);
    table.push_back(u);
  }
  return table;
}

double grid_value(const Model& model, const GridField& u, const Point& x) {
  if (x.cemetery) return 0.0;
  if (model.grid.singleton()) return u[0];
  return model.grid.interpolate_linear(u, x);
}

double ratio_or_inf(double num, double den) {
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

}  // namespace

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j = {{"test_id", r.test_id},
                      {"model_fingerprint", r.model_fingerprint},
                      {"metric", r.metric},
                      {"statistic", r.statistic},
                      {"threshold", r.threshold},
                      {"mc_sizes", r.mc_sizes},
                      {"pass", r.pass},
                      {"infeasible", r.infeasible},
                      {"details", r.details},
                      {"sensitivity", r.sensitivity}};
  j["p_value"] = r.p_value >= 0.0 ? nlohmann::json(r.p_value) : nlohmann::json(nullptr);
  j["relative_error"] = r.relative_error >= 0.0 ? nlohmann::json(r.relative_error) : nlohmann::json(nullptr);
  return j;
}

double mass_at_time(const TrajectoryRecord& traj, double t) {
  if (t >= traj.extinction_time) return 0.0;
  std::size_t k = traj.index_of(t);
  if (k == static_cast<std::size_t>(-1)) {
    if (!traj.times.empty() && t > traj.times.back()) return 0.0;
    throw std::out_of_range("mass_at_time: time is not on the trajectory grid");
  }
  return traj.mass_at(k);
}

NearExtinction near_extinction_statistic(const TrajectoryRecord& traj, int dim) {
  NearExtinction out;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& m = traj.states[k];
    if (m.empty()) continue;
    double total = m.total_mass();
    std::array<double, kMaxDim> mean{};
    for (const auto& a : m.atoms)
      for (int i = 0; i < dim; ++i) mean[i] += a.mass * a.x.x[i] / total;
    double var = 0.0;
    for (const auto& a : m.atoms)
      for (int i = 0; i < dim; ++i) var += a.mass * (a.x.x[i] - mean[i]) * (a.x.x[i] - mean[i]) / total;
    out.times.push_back(traj.times[k]);
    out.dispersion.push_back(std::sqrt(std::max(var, 0.0)));
    out.z = Point{};
    out.z.x = mean;
    out.valid = true;
  }
  return out;
}

NearExtinction near_extinction_statistic(const WilliamsSample& sample, int dim) {
  return near_extinction_statistic(sample.assembled, dim);
}

VerificationReport verify_closed_form(const Model& model) {
  auto r = make_report("closed_form", model);
  r.metric = "max relative error of v and w";
  if (!model.homogeneous) throw ConfigError("closed_form needs a homogeneous mechanism");
  LocalMechanism local = model.mechanism.at(Point{});
  if (!has_closed_form(local)) throw ConfigError("closed_form needs a quadratic or stable mechanism");
  double v_err = 0.0, w_err = 0.0, fd_err = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    double v = solve_v_homogeneous(local, t);
    double vc = homogeneous_v(local, t);
    double w = solve_w_homogeneous(local, t);
    double wc = local.psi(vc);
    double step = 1e-4 * t;
    double fd = (homogeneous_v(local, t - step) - homogeneous_v(local, t + step)) / (2.0 * step);
    v_err = std::max(v_err, std::abs(v - vc) / vc);
    w_err = std::max(w_err, std::abs(w - wc) / wc);
    fd_err = std::max(fd_err, std::abs(fd - wc) / wc);
    rows.push_back({{"t", t}, {"v", v}, {"v_closed", vc}, {"w", w}, {"w_closed", wc}, {"w_fd", fd}});
  }
  r.details = {{"rows", rows}, {"v_error", v_err}, {"w_error", w_err}, {"w_fd_error", fd_err}};
  r.statistic = std::max({v_err, w_err, fd_err});
  r.relative_error = r.statistic;
  r.threshold = 1e-6;
  r.pass = v_err <= 1e-8 && w_err <= 1e-6 && fd_err <= 1e-6;
  return r;
}

VerificationReport verify_csbp(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("csbp_exact", model);
  if (model.config.mechanism.kind != "quadratic") throw ConfigError("csbp_exact needs the quadratic mechanism");
  LocalMechanism local = model.mechanism.at(Point{});
  if (local.alpha != 0.0) throw ConfigError("csbp_exact needs alpha = 0");
  const double t = model.config.h;
  const double dt = model.config.grid.dt;
  const std::size_t n = model.config.mc.martingale_replicas;
  const double m0 = model.mu.total_mass();
  auto stepper = model.stepper();
  auto particle = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kCsbpParticle, i});
    return run_to(stepper, model.mu, t, dt, rng).total_mass();
  });
  auto exact = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kCsbpExact, i});
    return sample_csbp_exact(local.b, m0, t, rng);
  });
  auto ks = ks_two_sample(particle, exact);
  double p0 = extinction_cdf(model.profile, model.mu, t);
  double f0 = static_cast<double>(zeros(particle)) / static_cast<double>(n);
  double se0 = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
  r.metric = "KS p-value, particle vs exact total mass at t = h";
  r.statistic = ks.statistic;
  r.p_value = ks.p_value;
  r.threshold = 0.01;
  r.mc_sizes = {{"particle", n}, {"exact", n}};
  r.details = {{"t", t}, {"extinct_fraction", f0}, {"extinct_predicted", p0}, {"extinct_se", se0}};
  r.pass = ks.p_value >= 0.01 && within_sigma(f0, p0, se0);
  return r;
}

VerificationReport verify_martingale(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("martingale", model);
  const double h = model.config.h;
  const double t = 0.5 * h;
  const double dt = model.config.grid.dt;
  const std::size_t n = model.config.mc.martingale_replicas;
  auto stepper = model.stepper();
  auto m_values = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kMartingale, i});
    return mweight(model.profile, model.mu, h, t, run_to(stepper, model.mu, t, dt, rng));
  });
  auto m_est = mean_estimate(m_values);
  bool m_ok = within_sigma(m_est.value, 1.0, m_est.std_error);

  const Point x0 = first_atom(model);
  const auto times = uniform_times(dt, steps_in(t, dt, "h/2"));
  auto y_values = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kSpinePath, i});
    std::vector<Point> path{x0};
    for (std::size_t k = 1; k < times.size(); ++k) path.push_back(model.motion.sample_step(path.back(), dt, rng));
    return spine_weight_Y(model.profile, model.mechanism, times, path, h);
  });
  auto y_est = mean_estimate(y_values);
  bool y_ok;
  if (model.homogeneous) {
    y_ok = std::all_of(y_values.begin(), y_values.end(), [](double y) { return y == 1.0; });
  } else {
    y_ok = within_sigma(y_est.value, 1.0, y_est.std_error);
  }
  r.metric = "|mean M - 1| / se";
  r.statistic = m_est.std_error > 0.0 ? std::abs(m_est.value - 1.0) / m_est.std_error : 0.0;
  r.threshold = 4.0;
  r.mc_sizes = {{"trajectories", n}, {"spine_paths", n}};
  r.details = {{"t", t},
               {"h", h},
               {"M_mean", m_est.value},
               {"M_se", m_est.std_error},
               {"Y_mean", y_est.value},
               {"Y_se", y_est.std_error},
               {"Y_identically_one", model.homogeneous && y_ok}};
  r.pass = m_ok && y_ok;
  return r;
}

namespace {

struct LawSamples {
  // masses[time index][replica]
  std::vector<std::vector<double>> masses;
};

LawSamples williams_masses(const Model& model, const WilliamsControls& ctrl, const std::vector<double>& times,
                               std::size_t n, std::uint64_t seed, std::uint64_t role, std::uint64_t group,
                               unsigned workers) {
  auto stepper = model.stepper();
  auto rows = replicate<std::vector<double>>(n, workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {role, group, i});
    auto w = sample_williams(stepper, model.profile, model.mu, model.config.h, ctrl, rng);
    std::vector<double> out;
    for (double t : times) out.push_back(mass_at_time(w.assembled, t));
    return out;
  });
  LawSamples s;
  s.masses.assign(times.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < times.size(); ++k) s.masses[k][i] = rows[i][k];
  return s;
}

std::vector<Pair> pairs(const LawSamples& s, std::size_t a, std::size_t b) {
  std::vector<Pair> out(s.masses[a].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {s.masses[a][i], s.masses[b][i]};
  return out;
}

}  // namespace

VerificationReport verify_williams_law(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("williams_law", model);
  if (!model.homogeneous) throw ConfigError("williams_law needs a homogeneous mechanism");
  const auto& cfg = model.config;
  const double h = cfg.h, dt = cfg.grid.dt;
  const std::vector<double> times = {0.25 * h, 0.5 * h, 0.75 * h};
  const std::size_t n = cfg.mc.replicas;
  const std::size_t seeds = cfg.mc.seeds;
  auto stepper = model.stepper();
  WilliamsControls ctrl = model.williams;
  ctrl.horizon = times.back();
  WilliamsControls half = ctrl;
  half.delta = 0.5 * ctrl.delta;
  const bool halving = half.delta >= dt * (1.0 - 1e-9);

  r.metric = "seeds with all KS p >= 0.001";
  r.mc_sizes = {{"direct_per_seed", n}, {"williams_per_seed", n}, {"seeds", seeds},
                {"null_runs", cfg.mc.null_runs}, {"null_replicas", cfg.mc.null_replicas}};
  double predicted = extinction_cdf(model.profile, model.mu, h + cfg.eps) -
                     extinction_cdf(model.profile, model.mu, h);
  nlohmann::json per_seed = nlohmann::json::array();
  std::size_t seeds_ok = 0;
  std::vector<double> d_full(times.size(), 0.0), d_half(times.size(), 0.0);
  std::size_t total_attempts = 0;
  for (std::size_t j = 0; j < seeds; ++j) {
    std::uint64_t seed_j = derive_seed(seed, {j});
    LawSamples direct;
    direct.masses.assign(times.size(), std::vector<double>(n));
    std::vector<std::size_t> attempts(n);
    try {
      auto rows = replicate<std::vector<double>>(n, opt.workers, [&](std::size_t i) {
        Rng rng = Rng::derived(seed_j, {kDirect, i});
        auto draw = sample_conditioned_direct(stepper, model.mu, h, cfg.eps, dt, rng, cfg.mc.attempt_budget);
        attempts[i] = draw.attempts;
        std::vector<double> out;
        for (double t : times) out.push_back(mass_at_time(draw.trajectory, t));
        return out;
      });
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < times.size(); ++k) direct.masses[k][i] = rows[i][k];
    } catch (const InfeasibleError& e) {
      r.infeasible = true;
      r.pass = false;
      r.details = {{"error", e.what()}, {"predicted_acceptance", predicted}};
      return r;
    }
    std::size_t seed_attempts = 0;
    for (auto a : attempts) seed_attempts += a;
    total_attempts += seed_attempts;
    auto williams = williams_masses(model, ctrl, times, n, seed_j, kWilliams, 0, opt.workers);
    nlohmann::json row = {{"seed_index", j}, {"acceptance", static_cast<double>(n) / seed_attempts}};
    bool ok = true;
    nlohmann::json ks_rows = nlohmann::json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
      auto ks = ks_two_sample(direct.masses[k], williams.masses[k]);
      d_full[k] += ks.statistic / static_cast<double>(seeds);
      ok = ok && ks.p_value >= kKsLevel;
      ks_rows.push_back({{"t", times[k]}, {"statistic", ks.statistic}, {"p_value", ks.p_value},
                         {"mean_direct", mean_estimate(direct.masses[k]).value},
                         {"mean_williams", mean_estimate(williams.masses[k]).value}});
    }
    Rng energy_rng = Rng::derived(seed_j, {kEnergy});
    auto energy = energy_test(pairs(direct, 0, 2), pairs(williams, 0, 2), cfg.mc.permutations, energy_rng);
    row["ks"] = ks_rows;
    row["energy"] = {{"statistic", energy.statistic}, {"p_value", energy.p_value}};
    row["pass"] = ok;
    if (halving) {
      auto finer = williams_masses(model, half, times, n, seed_j, kWilliamsHalf, 0, opt.workers);
      nlohmann::json half_rows = nlohmann::json::array();
      for (std::size_t k = 0; k < times.size(); ++k) {
        auto ks = ks_two_sample(direct.masses[k], finer.masses[k]);
        d_half[k] += ks.statistic / static_cast<double>(seeds);
        half_rows.push_back({{"t", times[k]}, {"statistic", ks.statistic}, {"p_value", ks.p_value}});
      }
      row["ks_half_delta"] = half_rows;
    }
    if (ok) ++seeds_ok;
    per_seed.push_back(row);
  }
  const std::size_t required = (2 * seeds + 2) / 3;

  bool sensitivity_ok = true;
  for (std::size_t k = 0; k < times.size() && halving; ++k) {
    double ratio = ratio_or_inf(d_half[k], d_full[k]);
    bool ok = ratio > 0.5 && ratio < 2.0;
    sensitivity_ok = sensitivity_ok && ok;
    r.sensitivity.push_back({{"parameter", "delta"}, {"from", ctrl.delta}, {"to", half.delta}, {"t", times[k]},
                             {"mean_ks_from", d_full[k]}, {"mean_ks_to", d_half[k]}, {"ratio", ratio},
                             {"shrinks", d_half[k] <= d_full[k]}, {"pass", ok}});
  }

  // Same-law calibration: Williams against itself on fresh streams.
  std::size_t rejections = 0;
  for (std::size_t run = 0; run < cfg.mc.null_runs; ++run) {
    const std::vector<double> mid = {0.5 * h};
    auto a = williams_masses(model, ctrl, mid, cfg.mc.null_replicas, seed, kNullA, run, opt.workers);
    auto b = williams_masses(model, ctrl, mid, cfg.mc.null_replicas, seed, kNullB, run, opt.workers);
    if (ks_two_sample(a.masses[0], b.masses[0]).p_value < kNullLevel) ++rejections;
  }
  double null_rate = cfg.mc.null_runs ? static_cast<double>(rejections) / cfg.mc.null_runs : 0.0;
  bool null_ok = null_rate <= kNullRate;

  r.statistic = static_cast<double>(seeds_ok);
  r.threshold = static_cast<double>(required);
  r.details = {{"h", h},
               {"eps", cfg.eps},
               {"delta", ctrl.delta},
               {"horizon", ctrl.horizon},
               {"predicted_acceptance", predicted},
               {"observed_acceptance", static_cast<double>(n * seeds) / total_attempts},
               {"seeds", per_seed},
               {"null_rejection_rate", null_rate},
               {"delta_halving_checked", halving}};
  r.pass = seeds_ok >= required && sensitivity_ok && null_ok;
  return r;
}

VerificationReport verify_mixture(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("mixture", model);
  if (!model.homogeneous) throw ConfigError("mixture needs a homogeneous mechanism");
  const auto& cfg = model.config;
  const double dt = cfg.grid.dt;
  std::vector<double> times = cfg.tests.mixture_times;
  std::sort(times.begin(), times.end());
  const std::size_t n = cfg.mc.replicas;
  auto stepper = model.stepper();
  WilliamsControls ctrl = model.williams;
  ctrl.horizon = times.back();

  auto mixture_rows = replicate<std::vector<double>>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kMixture, i});
    auto draw = sample_extinction_time(model.profile, model.mu, rng);
    auto w = sample_williams(stepper, model.profile, model.mu, draw.h, ctrl, rng);
    std::vector<double> out;
    for (double t : times) out.push_back(t >= draw.h ? 0.0 : mass_at_time(w.assembled, t));
    return out;
  });
  auto forward_rows = replicate<std::vector<double>>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kForward, i});
    return forward_masses(stepper, model.mu, times, dt, rng);
  });

  bool ok = true;
  double min_p = 1.0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = mixture_rows[i][k];
      b[i] = forward_rows[i][k];
    }
    double p0 = extinction_cdf(model.profile, model.mu, times[k]);
    double se0 = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(n));
    double fa = static_cast<double>(zeros(a)) / n, fb = static_cast<double>(zeros(b)) / n;
    auto z = two_proportion_test(zeros(a), n, zeros(b), n);
    auto pa = positive_part(a), pb = positive_part(b);
    auto ks = ks_two_sample(pa, pb);
    bool row_ok = std::abs(z.statistic) <= 4.0 && within_sigma(fa, p0, se0) && within_sigma(fb, p0, se0) &&
                  ks.p_value >= kKsLevel;
    ok = ok && row_ok;
    min_p = std::min(min_p, ks.p_value);
    rows.push_back({{"t", times[k]},
                    {"zero_fraction_mixture", fa},
                    {"zero_fraction_forward", fb},
                    {"zero_predicted", p0},
                    {"z", z.statistic},
                    {"ks_statistic", ks.statistic},
                    {"ks_p_value", ks.p_value},
                    {"pass", row_ok}});
  }

  std::size_t rejections = 0;
  for (std::size_t run = 0; run < cfg.mc.null_runs; ++run) {
    auto side = [&](std::uint64_t role) {
      return replicate<double>(cfg.mc.null_replicas, opt.workers, [&](std::size_t i) {
        Rng rng = Rng::derived(seed, {role, run, i});
        return forward_masses(stepper, model.mu, {times.back()}, dt, rng)[0];
      });
    };
    auto a = side(kNullA), b = side(kNullB);
    auto pa = positive_part(a), pb = positive_part(b);
    if (!pa.empty() && !pb.empty() && ks_two_sample(pa, pb).p_value < kNullLevel) ++rejections;
  }
  double null_rate = cfg.mc.null_runs ? static_cast<double>(rejections) / cfg.mc.null_runs : 0.0;

  r.metric = "minimum positive-part KS p-value";
  r.statistic = min_p;
  r.p_value = min_p;
  r.threshold = kKsLevel;
  r.mc_sizes = {{"mixture", n}, {"forward", n}, {"null_runs", cfg.mc.null_runs},
                {"null_replicas", cfg.mc.null_replicas}};
  r.details = {{"times", times}, {"rows", rows}, {"horizon", ctrl.horizon}, {"null_rejection_rate", null_rate}};
  r.pass = ok && null_rate <= kNullRate;
  return r;
}

VerificationReport laplace_cross_check(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("feynman_kac", model);
  const auto& cfg = model.config;
  const double t = cfg.tests.fk_time;
  const double dt = cfg.grid.dt;
  const std::size_t n = cfg.mc.fk_replicas;
  const std::size_t steps = steps_in(t, dt, "tests.fk_time");
  const Point x0 = first_atom(model);
  auto stepper = model.stepper();
  const ParticleMeasure start = unit_at(x0);

  // Left side: the superprocess itself.
  auto masses = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kFkLeft, i});
    return run_to(stepper, start, t, dt, rng).total_mass();
  });
  std::vector<double> left_values(n);
  for (std::size_t i = 0; i < n; ++i) left_values[i] = masses[i] * std::exp(-masses[i]);
  auto left = mean_estimate(left_values);
  auto first_moment = mean_estimate(masses);

  // Right side: the motion weighted by the linearized mechanism along u_g.
  auto table = mild_table(model, ScalarField::constant(1.0), dt, steps);
  auto right_values = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kFkRight, i});
    Point x = x0;
    double integral = 0.0;
    double prev = model.mechanism.psi_prime(x, grid_value(model, table[steps], x));
    for (std::size_t k = 1; k <= steps; ++k) {
      x = model.motion.sample_step(x, dt, rng);
      double cur = x.cemetery ? 0.0 : model.mechanism.psi_prime(x, grid_value(model, table[steps - k], x));
      integral += 0.5 * dt * (prev + cur);
      prev = cur;
      if (x.cemetery) return 0.0;
    }
    return std::exp(-integral);
  });
  auto right_path = mean_estimate(right_values);
  double damp = std::exp(-grid_value(model, table[steps], x0));
  double right = right_path.value * damp;
  double right_se = right_path.std_error * damp;
  double gap = std::abs(left.value - right);
  double allowed = 0.02 * std::abs(right) + 4.0 * std::hypot(left.std_error, right_se);

  bool alpha_zero = model.mechanism.alpha().is_constant() && model.mechanism.alpha()(x0) == 0.0;
  bool moment_ok = !alpha_zero || !model.motion.conservative() ||
                   within_sigma(first_moment.value, 1.0, first_moment.std_error);

  r.metric = "|left - right|";
  r.statistic = gap;
  r.threshold = allowed;
  r.relative_error = right != 0.0 ? gap / std::abs(right) : gap;
  r.mc_sizes = {{"trajectories", n}, {"motion_paths", n}};
  r.details = {{"t", t},
               {"x", std::vector<double>(x0.x.begin(), x0.x.begin() + cfg.motion.dim)},
               {"left", left.value},
               {"left_se", left.std_error},
               {"right", right},
               {"right_se", right_se},
               {"first_moment", first_moment.value},
               {"first_moment_se", first_moment.std_error},
               {"first_moment_checked", alpha_zero && model.motion.conservative()}};
  r.pass = gap <= allowed && moment_ok;
  return r;
}

VerificationReport verify_flow(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("flow", model);
  const auto& cfg = model.config;
  const double t = cfg.tests.flow_t, s = cfg.tests.flow_s;
  const double dt = cfg.grid.dt;
  const auto& profile = model.profile;

  // v_{t+s} = u_{v_t}(s) on the spatial grid.
  SolverControls controls = model.solver;
  MildSolver probe(model.mechanism, model.motion, model.grid, controls);
  double v_hi = 0.0;
  for (const auto& p : probe.points()) v_hi = std::max(v_hi, profile.v(t, p));
  auto vt = ScalarField::from_function([&](const Point& x) { return profile.v(t, x); },
                                       Interval{0.0, v_hi}, "v_t");
  GridField u = solve_u_f(model.mechanism, model.motion, vt, s, model.grid, controls);
  double flow_err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (probe.outside(i)) continue;
    double target = profile.v(t + s, probe.points()[i]);
    flow_err = std::max(flow_err, std::abs(u[i] - target) / target);
  }
  const double flow_tol = model.homogeneous ? 1e-8 : 1e-3;

  // w(t+s, x) = Pi_x[exp(-int_0^t psi'(xi_u, v(t+s-u, xi_u)) du) w(s, xi_t)].
  const Point x0 = first_atom(model);
  const std::size_t steps = steps_in(t, dt, "tests.flow_t");
  const std::size_t n = model.homogeneous ? 1 : cfg.mc.fk_replicas;
  auto values = replicate<double>(n, opt.workers, [&](std::size_t i) {
    Rng rng = Rng::derived(seed, {kFlowPaths, i});
    Point x = x0;
    double integral = 0.0;
    double prev = model.mechanism.psi_prime(x, profile.v(t + s, x));
    for (std::size_t k = 1; k <= steps; ++k) {
      double tk = static_cast<double>(k) * dt;
      x = model.motion.sample_step(x, dt, rng);
      if (x.cemetery) return 0.0;
      double cur = model.mechanism.psi_prime(x, profile.v(t + s - tk, x));
      integral += 0.5 * dt * (prev + cur);
      prev = cur;
    }
    return std::exp(-integral) * profile.w(s, x);
  });
  auto rhs = mean_estimate(values);
  double lhs = profile.w(t + s, x0);
  double gap = std::abs(rhs.value - lhs);
  double allowed = 0.02 * lhs + 4.0 * rhs.std_error;

  r.metric = "max relative flow error";
  r.statistic = flow_err;
  r.threshold = flow_tol;
  r.relative_error = flow_err;
  r.mc_sizes = {{"motion_paths", n}};
  r.details = {{"t", t},
               {"s", s},
               {"flow_error", flow_err},
               {"w_tabulated", lhs},
               {"w_feynman_kac", rhs.value},
               {"w_feynman_kac_se", rhs.std_error},
               {"w_gap", gap},
               {"w_allowed", allowed}};
  if (profile.mode() == ExtinctionProfile::Mode::grid) {
    r.details["max_w_discrepancy"] = profile.diagnostics.max_w_discrepancy;
    r.details["tie_break_points"] = profile.diagnostics.tie_break_points;
  }
  r.pass = flow_err <= flow_tol && gap <= allowed;
  return r;
}

VerificationReport verify_concentration(const Model& model, std::uint64_t seed, const VerifyOptions& opt) {
  auto r = make_report("concentration", model);
  const auto& cfg = model.config;
  const double dt = cfg.grid.dt;
  const double near = cfg.tests.concentration_near, far = cfg.tests.concentration_far;
  const double cap = cfg.tests.z_time_cap;
  const std::size_t cap_steps = steps_in(std::round(cap / dt) * dt, dt, "tests.z_time_cap");
  const int dim = cfg.motion.dim;
  ParticleControls fine = model.particles;
  fine.kappa = std::min(fine.kappa, cfg.tests.concentration_kappa);
  const SuperprocessStepper stepper(model.mechanism, model.motion, fine);
  const auto cap_times = uniform_times(dt, cap_steps);

  // Dispersion at H - near and H - far over replicas that live past `far`.
  const std::size_t target = cfg.mc.concentration_replicas;
  const std::size_t batch = target;
  std::vector<double> disp_near, disp_far;
  std::size_t tried = 0;
  for (std::size_t round = 0; disp_near.size() < target && round < 50; ++round) {
    auto rows = replicate<std::vector<double>>(batch, opt.workers, [&](std::size_t i) {
      Rng rng = Rng::derived(seed, {kConcentration, round, i});
      auto traj = sample_superprocess(stepper, model.mu, cap_times, rng);
      double H = traj.extinction_time;
      if (!std::isfinite(H) || H < far + dt * 0.5) return std::vector<double>{};
      auto at = [&](double t) {
        std::size_t k = static_cast<std::size_t>(std::llround(t / dt));
        auto stat = near_extinction_statistic(
            TrajectoryRecord{{traj.times[k]}, {traj.states[k]}, kNeverExtinct}, dim);
        return stat.dispersion.at(0);
      };
      return std::vector<double>{at(H - near), at(H - far)};
    });
    tried += batch;
    for (const auto& row : rows) {
      if (row.empty() || disp_near.size() >= target) continue;
      disp_near.push_back(row[0]);
      disp_far.push_back(row[1]);
    }
  }
  bool trend_ok = disp_near.size() >= target && median(disp_near) < median(disp_far);
  r.details = {{"near", near},
               {"far", far},
               {"replicas", disp_near.size()},
               {"simulated", tried},
               {"median_dispersion_near", disp_near.empty() ? 0.0 : median(disp_near)},
               {"median_dispersion_far", disp_far.empty() ? 0.0 : median(disp_far)}};
  r.mc_sizes = {{"concentration_replicas", disp_near.size()}};
  r.metric = "median dispersion near / far";
  r.statistic = disp_far.empty() ? 0.0 : ratio_or_inf(median(disp_near), median(disp_far));
  r.threshold = 1.0;
  r.pass = trend_ok;

  if (model.homogeneous) {
    // Z = lim X_t/|X_t| against xi run from nu to an independent H.
    const std::size_t n = cfg.mc.z_replicas;
    auto z_forward = replicate<double>(n, opt.workers, [&](std::size_t i) {
      const std::size_t budget = cfg.mc.attempt_budget;
      for (std::size_t attempt = 0; attempt < budget; ++attempt) {
        Rng rng = Rng::derived(seed, {kZForward, i, attempt});
        auto traj = sample_superprocess(stepper, model.mu, cap_times, rng);
        if (!std::isfinite(traj.extinction_time)) continue;
        return near_extinction_statistic(traj, dim).z.x[0];
      }
      throw InfeasibleError("no extinction before tests.z_time_cap", 0.0, budget);
    });
    const double mu_mass = model.mu.total_mass();
    auto z_oracle = replicate<double>(n, opt.workers, [&](std::size_t i) {
      Rng rng = Rng::derived(seed, {kZOracle, i});
      double h;
      do {
        h = sample_extinction_time(model.profile, model.mu, rng).h;
      } while (h > cap_times.back());
      double pick = rng.uniform() * mu_mass;
      Point x = model.mu.atoms.back().x;
      for (const auto& a : model.mu.atoms) {
        if (pick < a.mass) {
          x = a.x;
          break;
        }
        pick -= a.mass;
      }
      return model.motion.sample_path(x, h, dt, rng).x[0];
    });
    auto ks = ks_two_sample(z_forward, z_oracle);
    r.details["z_ks_statistic"] = ks.statistic;
    r.details["z_ks_p_value"] = ks.p_value;
    r.mc_sizes["z_replicas"] = n;
    r.p_value = ks.p_value;
    r.pass = r.pass && ks.p_value >= kKsLevel;
  }
  return r;
}

VerificationReport run_test(const std::string& id, const Model& model, std::uint64_t seed,
                            const VerifyOptions& opt) {
  // Each test gets its own stream family keyed by name.
  std::uint64_t key = 0;
  for (char c : id) key = key * 131 + static_cast<unsigned char>(c);
  const std::uint64_t s = derive_seed(seed, {key});
  if (id == "closed_form") return verify_closed_form(model);
  if (id == "csbp_exact") return verify_csbp(model, s, opt);
  if (id == "martingale") return verify_martingale(model, s, opt);
  if (id == "williams_law") return verify_williams_law(model, s, opt);
  if (id == "mixture") return verify_mixture(model, s, opt);
  if (id == "feynman_kac") return laplace_cross_check(model, s, opt);
  if (id == "flow") return verify_flow(model, s, opt);
  if (id == "concentration") return verify_concentration(model, s, opt);
  throw ConfigError("unknown test '" + id + "'");
}

double compute_J(const Model& model, double s, double h,
                 const std::vector<std::pair<double, ScalarField>>& observations, const Point& x) {
  std::vector<std::pair<double, ScalarField>> obs;
  for (const auto& o : observations)
    if (o.first > s) obs.push_back(o);
  std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const double dt = model.config.grid.dt;
  for (const auto& o : obs) {
    steps_in(o.first, dt, "observation time");
    if (!(o.first < h)) throw std::invalid_argument("compute_J: observation times must precede h");
  }
  if (obs.empty()) return model.profile.v(h - s, x);
  MildSolver solver(model.mechanism, model.motion, model.grid, model.solver);
  const auto& pts = solver.points();
  GridField u(pts.size());
  const double last = obs.back().first;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = solver.outside(i) ? 0.0 : model.profile.v(h - last, pts[i]) + obs.back().second(pts[i]);
  }
  for (std::size_t j = obs.size() - 1; j > 0; --j) {
    solver.advance(u, obs[j].first - obs[j - 1].first);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!solver.outside(i)) u[i] += obs[j - 1].second(pts[i]);
  }
  solver.advance(u, obs.front().first - s);
  return grid_value(model, u, x);
}

}  // namespace superspine
