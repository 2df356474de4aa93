#include "superspine/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "superspine/errors.hpp"

namespace superspine {

SuperprocessStepper::SuperprocessStepper(const BranchingMechanism& mech, const MotionModel& motion,
                                         ParticleControls ctrl)
    : mech_(mech),
      motion_(motion),
      ctrl_(ctrl),
      homogeneous_(mech.homogeneous()),
      local_(mech.at(Point{})),
      transition_(ctrl.kappa) {
  if (!(ctrl_.kappa > 0.0)) throw ConfigError("particle kappa must be positive");
}

void SuperprocessStepper::advance(ParticleMeasure& state, double dt, Rng& rng) const {
  if (state.empty()) return;
  thread_local std::vector<double> pieces;
  thread_local std::vector<Atom> next;
  next.clear();
  const double ceiling = 2.0 * ctrl_.kappa;
  for (const auto& atom : state.atoms) {
    Point y = motion_.sample_step(atom.x, dt, rng);
    if (y.cemetery) continue;
    if (homogeneous_) {
      transition_.apply(local_, atom.mass, dt, rng, pieces);
    } else {
      transition_.apply(mech_.at(y), atom.mass, dt, rng, pieces);
    }
    for (double m : pieces) {
      if (!(m > 0.0)) continue;
      int parts = 1;
      while (m / parts > ceiling) parts *= 2;
      for (int p = 0; p < parts; ++p) next.push_back({y, m / parts});
    }
    if (next.size() > ctrl_.max_atoms) {
      throw NumericalError("particle scheme exceeded the atom ceiling of " +
                           std::to_string(ctrl_.max_atoms));
    }
  }
  state.atoms.assign(next.begin(), next.end());
}

std::vector<double> uniform_times(double dt, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = static_cast<double>(k) * dt;
  return t;
}

std::size_t grid_count_below(double t, double dt) {
  if (!(dt > 0.0) || !(t > 0.0)) throw std::invalid_argument("grid_count_below: need t, dt > 0");
  return static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
}

std::size_t steps_in(double t, double dt, const char* what) {
  double ratio = t / dt;
  double r = std::round(ratio);
  if (!(dt > 0.0) || r < 0.0 || std::abs(ratio - r) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError(std::string(what) + " is not a multiple of the grid step");
  }
  return static_cast<std::size_t>(r);
}

TrajectoryRecord sample_superprocess(const SuperprocessStepper& stepper, const ParticleMeasure& mu,
                                     std::span<const double> times, Rng& rng) {
  if (times.empty() || times[0] != 0.0) throw std::invalid_argument("time grid must start at 0");
  TrajectoryRecord rec;
  ParticleMeasure state = mu;
  rec.push(0.0, state);
  // Zero is a trap, so recording stops at the first empty state.
  for (std::size_t k = 1; k < times.size() && !state.empty(); ++k) {
    stepper.advance(state, times[k] - times[k - 1], rng);
    rec.push(times[k], state);
  }
  return rec;
}

TrajectoryRecord sample_superprocess(const BranchingMechanism& mech, const MotionModel& motion,
                                     const ParticleMeasure& mu, std::span<const double> times,
                                     const ParticleControls& ctrl, Rng& rng) {
  SuperprocessStepper stepper(mech, motion, ctrl);
  return sample_superprocess(stepper, mu, times, rng);
}

ConditionedDraw sample_conditioned_direct(const SuperprocessStepper& stepper,
                                          const ParticleMeasure& mu, double h, double eps, double dt,
                                          Rng& rng, std::size_t max_attempts) {
  if (eps < dt * (1.0 - 1e-9)) throw ConfigError("conditioning bin eps is narrower than dt");
  std::size_t h_steps = steps_in(h, dt, "conditioning time h");
  std::size_t total = h_steps + steps_in(eps, dt, "conditioning bin eps");
  auto times = uniform_times(dt, total);
  std::uint64_t base = rng.next_u64();
  ParticleMeasure state;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Rng trial(derive_seed(base, {attempt}));
    state = mu;
    bool rejected = state.empty();
    for (std::size_t k = 1; k <= total && !rejected; ++k) {
      stepper.advance(state, times[k] - times[k - 1], trial);
      if (k <= h_steps && state.empty()) rejected = true;
    }
    if (rejected || !state.empty()) continue;
    Rng replay(derive_seed(base, {attempt}));
    ConditionedDraw draw;
    draw.trajectory = sample_superprocess(stepper, mu, times, replay);
    draw.attempts = attempt + 1;
    return draw;
  }
  throw InfeasibleError("conditioned-direct sampler exhausted its attempt budget", 0.0, max_attempts);
}

double mweight(const ExtinctionProfile& profile, const ParticleMeasure& mu, double h, double t,
               const ParticleMeasure& xt) {
  if (!(t >= 0.0 && t < h)) throw std::invalid_argument("mweight: need 0 <= t < h");
  double w0 = mu.integrate([&](const Point& x) { return profile.w(h, x); });
  if (!(w0 > 0.0)) throw std::invalid_argument("mweight: <w_h, mu> = 0, conditioning is degenerate");
  double v0 = mu.integrate([&](const Point& x) { return profile.v(h, x); });
  double wt = xt.integrate([&](const Point& x) { return profile.w(h - t, x); });
  if (!(wt > 0.0)) return 0.0;
  double vt = xt.integrate([&](const Point& x) { return profile.v(h - t, x); });
  return std::exp(std::log(wt) - vt - std::log(w0) + v0);
}

}  // namespace superspine
