#include "superspine/williams.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "superspine/errors.hpp"

namespace superspine {

namespace {

constexpr double kAgeTol = 1e-9;

enum StreamRole : std::uint64_t { kSpineStream = 1, kInitialStream, kContinuousStream, kJumpStream };

double pairing(const ExtinctionProfile& profile, double t, const ParticleMeasure& m) {
  return m.integrate([&](const Point& x) { return profile.v(t, x); });
}

double stable_part_rate(const LocalMechanism& local, double A, double B) {
  if (!(local.stable_c > 0.0)) return 0.0;
  double p = local.stable_index - 1.0;
  return local.stable_c * local.stable_index * (std::pow(B, p) - std::pow(A, p));
}

double atom_rate(double y, double r, double A, double B) {
  return r * y * (std::exp(-y * A) - std::exp(-y * B));
}

using RateFn = double (*)(const ExtinctionProfile&, const BranchingMechanism&, double, double,
                          const Point&, double);
using MassFn = double (*)(const ExtinctionProfile&, const BranchingMechanism&, const WilliamsControls&,
                          double, double, const Point&, Rng&);

double continuous_mass(const ExtinctionProfile& profile, const BranchingMechanism&,
                       const WilliamsControls& ctrl, double, double, const Point& x, Rng&) {
  if (ctrl.eps_n) return *ctrl.eps_n;
  return ctrl.eps_factor / profile.v(ctrl.delta, x);
}

double jump_mass(const ExtinctionProfile& profile, const BranchingMechanism& mech,
                 const WilliamsControls& ctrl, double h, double s, const Point& x, Rng& rng) {
  return sample_jump_mass(mech.at(x), profile.v(h - s, x), profile.v(ctrl.delta, x), rng);
}

/*
 * Poisson points on [0, min(h - delta, end)) with the given rate along the
 * spine, by thinning. On each grid cell the spine is frozen and the rate is
 * nonincreasing in s, so its left-end value is an envelope; a violation
 * (interpolation noise in tabulated profiles) doubles the envelope and
 * restarts the cell.
 */
std::vector<ImmigrationEvent> immigration_stream(ImmigrationKind kind, RateFn rate, MassFn draw_mass,
                                                 const SpinePath& spine,
                                                 const ExtinctionProfile& profile,
                                                 const SuperprocessStepper& stepper, double h,
                                                 const WilliamsControls& ctrl, Rng& rng) {
  std::vector<ImmigrationEvent> events;
  const auto& mech = stepper.mechanism();
  double last = static_cast<double>(williams_grid_size(h, ctrl) - 1) * ctrl.dt;
  double s_max = std::min(h - ctrl.delta, last);
  for (std::size_t k = 0; k < spine.times.size(); ++k) {
    double a = spine.times[k];
    if (a >= s_max) break;
    double b = std::min(k + 1 < spine.times.size() ? spine.times[k + 1] : h, s_max);
    const Point& x = spine.locations[k];
    double envelope = rate(profile, mech, h, a, x, ctrl.delta);
    if (!(envelope > 0.0)) continue;
    std::vector<double> births;
    for (;;) {
      births.clear();
      bool violated = false;
      double s = a;
      for (;;) {
        s += rng.exponential() / envelope;
        if (s >= b) break;
        double r = rate(profile, mech, h, s, x, ctrl.delta);
        if (r > envelope * (1.0 + 1e-12)) {
          violated = true;
          break;
        }
        if (rng.uniform() * envelope < r) births.push_back(s);
      }
      if (!violated) break;
      envelope *= 2.0;
    }
    for (double s : births) {
      std::uint64_t base = rng.next_u64();
      double mass = draw_mass(profile, mech, ctrl, h, s, x, rng);
      ImmigrationEvent ev;
      bool accepted = false;
      for (std::size_t attempt = 0; attempt < ctrl.max_rejections; ++attempt) {
        Rng trial(derive_seed(base, {attempt}));
        if (propose_clone(stepper, profile, x, mass, s, h, ctrl, trial, ev)) {
          ev.kind = kind;
          ev.attempts = attempt + 1;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        throw InfeasibleError(std::string(to_string(kind)) + " immigration clone rejection exhausted",
                              0.0, ctrl.max_rejections);
      }
      events.push_back(std::move(ev));
    }
  }
  return events;
}

}  // namespace

const char* to_string(ImmigrationKind kind) {
  switch (kind) {
    case ImmigrationKind::continuous: return "continuous";
    case ImmigrationKind::jump: return "jump";
    case ImmigrationKind::initial: return "initial";
  }
  return "?";
}

std::size_t williams_grid_size(double h, const WilliamsControls& ctrl) {
  if (!(h > 0.0)) throw std::invalid_argument("williams: h must be positive");
  if (ctrl.horizon < h) return steps_in(ctrl.horizon, ctrl.dt, "horizon") + 1;
  return grid_count_below(h, ctrl.dt);
}

double continuous_rate(const ExtinctionProfile& profile, const BranchingMechanism& mech, double h,
                       double s, const Point& x, double delta) {
  if (!(s < h - delta)) return 0.0;
  double b = mech.b()(x);
  if (!(b > 0.0)) return 0.0;
  return 2.0 * b * (profile.v(delta, x) - profile.v(h - s, x));
}

double jump_rate(const ExtinctionProfile& profile, const BranchingMechanism& mech, double h, double s,
                 const Point& x, double delta) {
  if (!(s < h - delta)) return 0.0;
  auto local = mech.at(x);
  if (!local.has_jumps()) return 0.0;
  double A = profile.v(h - s, x);
  double B = profile.v(delta, x);
  double total = stable_part_rate(local, A, B);
  for (auto [y, r] : local.atoms) total += atom_rate(y, r, A, B);
  return total;
}

double sample_jump_mass(const LocalMechanism& local, double A, double B, Rng& rng) {
  if (!(A < B)) throw std::invalid_argument("sample_jump_mass: need v(h-s) < v(delta)");
  double stable = stable_part_rate(local, A, B);
  double total = stable;
  for (auto [y, r] : local.atoms) total += atom_rate(y, r, A, B);
  if (!(total > 0.0)) throw std::invalid_argument("sample_jump_mass: kernel-free mechanism");
  double pick = rng.uniform() * total;
  if (pick < stable) {
    // y^{-a} (e^{-yA} - e^{-yB}) = int_A^B y^{1-a} e^{-y theta} d theta: a mixture of
    // Gamma(2 - a, theta) laws with theta^{a-1} uniform on [A^{a-1}, B^{a-1}].
    double p = local.stable_index - 1.0;
    double lo = std::pow(A, p), hi = std::pow(B, p);
    double theta = std::pow(lo + rng.uniform() * (hi - lo), 1.0 / p);
    return rng.gamma(2.0 - local.stable_index) / theta;
  }
  pick -= stable;
  for (auto [y, r] : local.atoms) {
    double part = atom_rate(y, r, A, B);
    if (pick < part) return y;
    pick -= part;
  }
  return local.atoms.back().first;
}

bool propose_clone(const SuperprocessStepper& stepper, const ExtinctionProfile& profile,
                   const Point& x, double mass, double s, double h, const WilliamsControls& ctrl,
                   Rng& rng, ImmigrationEvent& out) {
  const double dt = ctrl.dt;
  const double delta = ctrl.delta;
  const std::size_t n_end = williams_grid_size(h, ctrl) - 1;
  std::size_t k = static_cast<std::size_t>(std::floor(s / dt)) + 1;
  while (static_cast<double>(k) * dt <= s) ++k;
  while (k > 1 && static_cast<double>(k - 1) * dt > s) --k;

  out = ImmigrationEvent{};
  out.birth = s;
  out.source = x;
  out.mass = mass;
  ParticleMeasure state = ParticleMeasure::dirac(x, mass);
  out.clone.push(0.0, state);
  out.grid_index.push_back(ImmigrationEvent::npos);

  double age = 0.0;
  bool delta_checked = false;
  auto step_to = [&](double next_age, std::size_t slot) {
    stepper.advance(state, next_age - age, rng);
    age = next_age;
    out.clone.push(age, state);
    out.grid_index.push_back(slot);
  };
  for (std::size_t j = k; j <= n_end; ++j) {
    double grid_age = static_cast<double>(j) * dt - s;
    if (!delta_checked && delta < grid_age - kAgeTol) {
      step_to(delta, ImmigrationEvent::npos);
      delta_checked = true;
      if (state.empty()) return false;
    }
    step_to(grid_age, j);
    if (!delta_checked && std::abs(grid_age - delta) <= kAgeTol) delta_checked = true;
    // Dying by age delta means H <= delta; dying later, before h - s, is the target event.
    if (state.empty()) return age > delta + kAgeTol;
  }
  // Alive at the end: impose the rest of delta <= H < h - s exactly.
  double remaining = h - s - age;
  double p = std::exp(-pairing(profile, remaining, state));
  if (age < delta - kAgeTol) p -= std::exp(-pairing(profile, delta - age, state));
  return rng.uniform() < p;
}

ConditionedDraw sample_initial_immigration(const SuperprocessStepper& stepper,
                                           const ExtinctionProfile& profile,
                                           const ParticleMeasure& mu, double h,
                                           const WilliamsControls& ctrl, Rng& rng) {
  if (mu.empty()) throw std::invalid_argument("sample_initial_immigration: empty initial measure");
  auto times = uniform_times(ctrl.dt, williams_grid_size(h, ctrl) - 1);
  const double remaining = h - times.back();
  std::uint64_t base = rng.next_u64();
  for (std::size_t attempt = 0; attempt < ctrl.max_rejections; ++attempt) {
    Rng trial(derive_seed(base, {attempt}));
    auto traj = sample_superprocess(stepper, mu, times, trial);
    bool accept = std::isfinite(traj.extinction_time) ||
                  trial.uniform() < std::exp(-pairing(profile, remaining, traj.states.back()));
    if (accept) return {std::move(traj), attempt + 1};
  }
  throw InfeasibleError("initial immigration rejection exhausted its budget", 0.0,
                        ctrl.max_rejections);
}

std::vector<ImmigrationEvent> sample_continuous_immigration(
    const SpinePath& spine, const ExtinctionProfile& profile, const SuperprocessStepper& stepper,
    double h, const WilliamsControls& ctrl, Rng& rng) {
  return immigration_stream(ImmigrationKind::continuous, continuous_rate, continuous_mass, spine,
                            profile, stepper, h, ctrl, rng);
}

std::vector<ImmigrationEvent> sample_jump_immigration(
    const SpinePath& spine, const ExtinctionProfile& profile, const SuperprocessStepper& stepper,
    double h, const WilliamsControls& ctrl, Rng& rng) {
  return immigration_stream(ImmigrationKind::jump, jump_rate, jump_mass, spine, profile, stepper, h,
                            ctrl, rng);
}

TrajectoryRecord assemble(const TrajectoryRecord& initial, const std::vector<ImmigrationEvent>& events,
                          double dt, std::size_t grid_size, double h) {
  TrajectoryRecord out;
  out.times = uniform_times(dt, grid_size - 1);
  out.states.resize(grid_size);
  for (std::size_t k = 0; k < grid_size && k < initial.size(); ++k) {
    out.states[k].append(initial.states[k]);
  }
  for (const auto& ev : events) {
    for (std::size_t i = 0; i < ev.clone.size(); ++i) {
      std::size_t slot = ev.grid_index[i];
      if (slot != ImmigrationEvent::npos && slot < grid_size) out.states[slot].append(ev.clone.states[i]);
    }
  }
  if (!out.states.back().empty()) {
    out.extinction_time = grid_count_below(h, dt) == grid_size ? h : kNeverExtinct;
    return out;
  }
  std::size_t k = grid_size;
  while (k > 0 && out.states[k - 1].empty()) --k;
  out.extinction_time = out.times[k < grid_size ? k : grid_size - 1];
  return out;
}

WilliamsSample sample_williams(const SuperprocessStepper& stepper, const ExtinctionProfile& profile,
                               const ParticleMeasure& mu, double h, const WilliamsControls& ctrl,
                               Rng& rng) {
  if (!(ctrl.delta >= ctrl.dt * (1.0 - 1e-9))) throw ConfigError("truncation delta is below dt");
  std::uint64_t master = rng.next_u64();
  WilliamsSample out;
  out.h = h;
  out.delta = ctrl.delta;

  Rng spine_rng = Rng::derived(master, {kSpineStream});
  auto nu = spine_initial_measure(profile, mu, h);
  out.spine = sample_spine(profile, stepper.mechanism(), stepper.motion(), nu, h, ctrl.dt,
                           ctrl.spine_particles, spine_rng);

  Rng initial_rng = Rng::derived(master, {kInitialStream});
  auto initial = sample_initial_immigration(stepper, profile, mu, h, ctrl, initial_rng);
  out.initial = std::move(initial.trajectory);
  out.initial_attempts = initial.attempts;

  Rng continuous_rng = Rng::derived(master, {kContinuousStream});
  out.events = sample_continuous_immigration(out.spine, profile, stepper, h, ctrl, continuous_rng);
  Rng jump_rng = Rng::derived(master, {kJumpStream});
  auto jumps = sample_jump_immigration(out.spine, profile, stepper, h, ctrl, jump_rng);
  out.events.insert(out.events.end(), std::make_move_iterator(jumps.begin()),
                    std::make_move_iterator(jumps.end()));

  out.assembled = assemble(out.initial, out.events, ctrl.dt, williams_grid_size(h, ctrl), h);
  return out;
}

}  // namespace superspine
