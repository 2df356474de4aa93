#include "superspine/spine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "superspine/errors.hpp"
#include "superspine/sampler.hpp"

namespace superspine {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Point draw_atom(const ParticleMeasure& nu, Rng& rng) {
  double total = nu.total_mass();
  double pick = rng.uniform() * total;
  for (const auto& a : nu.atoms) {
    if (pick < a.mass) return a.x;
    pick -= a.mass;
  }
  return nu.atoms.back().x;
}

}  // namespace

ParticleMeasure spine_initial_measure(const ExtinctionProfile& profile, const ParticleMeasure& mu,
                                      double h) {
  double total = mu.integrate([&](const Point& x) { return profile.w(h, x); });
  if (!(total > 0.0)) throw std::invalid_argument("spine_initial_measure: all weights are zero");
  ParticleMeasure nu;
  for (const auto& a : mu.atoms) nu.add(a.x, a.mass * profile.w(h, a.x) / total);
  return nu;
}

double log_y_increment(const ExtinctionProfile& profile, const BranchingMechanism& mech, double h,
                       double t0, const Point& x0, double t1, const Point& x1) {
  double w1 = profile.w(h - t1, x1);
  if (!(w1 > 0.0) || x1.cemetery) return kNegInf;
  double w0 = profile.w(h - t0, x0);
  double p0 = mech.psi_prime(x0, profile.v(h - t0, x0));
  double p1 = mech.psi_prime(x1, profile.v(h - t1, x1));
  return std::log(w1) - std::log(w0) - 0.5 * (t1 - t0) * (p0 + p1);
}

double spine_weight_Y(const ExtinctionProfile& profile, const BranchingMechanism& mech,
                      std::span<const double> times, std::span<const Point> locations, double h) {
  if (times.size() != locations.size() || times.empty()) {
    throw std::invalid_argument("spine_weight_Y: path times and locations differ in length");
  }
  if (!(times.back() < h)) throw std::invalid_argument("spine_weight_Y: path must end before h");
  if (profile.homogeneous()) return 1.0;
  if (h - times.back() < profile.t_min() || h - times.front() > profile.t_max()) {
    throw std::out_of_range("spine_weight_Y: h - t outside the profile range");
  }
  double log_y = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    log_y += log_y_increment(profile, mech, h, times[k - 1], locations[k - 1], times[k], locations[k]);
  }
  return std::exp(log_y);
}

SpinePath sample_spine(const ExtinctionProfile& profile, const BranchingMechanism& mech,
                       const MotionModel& motion, const ParticleMeasure& nu, double h, double dt,
                       std::size_t n_particles, Rng& rng) {
  if (n_particles < 1) throw std::invalid_argument("sample_spine: n_particles must be at least 1");
  if (nu.empty()) throw std::invalid_argument("sample_spine: empty initial measure");
  SpinePath path;
  path.times = uniform_times(dt, grid_count_below(h, dt) - 1);
  const std::size_t K = path.times.size();

  if (profile.homogeneous()) {
    path.locations.resize(K);
    path.locations[0] = draw_atom(nu, rng);
    for (std::size_t k = 1; k < K; ++k) path.locations[k] = motion.sample_step(path.locations[k - 1], dt, rng);
    path.log_increments.assign(K - 1, 0.0);
    path.cumulative_log_y.assign(K, 0.0);
    return path;
  }

  const std::size_t n = n_particles;
  std::vector<std::vector<Point>> paths(n, std::vector<Point>(K));
  std::vector<double> logw(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) paths[p][0] = draw_atom(nu, rng);
  std::size_t low_ess_run = 0;
  std::vector<double> weights(n);
  for (std::size_t k = 1; k < K; ++k) {
    for (std::size_t p = 0; p < n; ++p) {
      paths[p][k] = motion.sample_step(paths[p][k - 1], dt, rng);
      if (logw[p] == kNegInf) continue;
      logw[p] += log_y_increment(profile, mech, h, path.times[k - 1], paths[p][k - 1],
                                 path.times[k], paths[p][k]);
    }
    if (n == 1) continue;
    double top = *std::max_element(logw.begin(), logw.end());
    if (top == kNegInf) throw NumericalError("spine sampler: every particle has zero weight");
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      weights[p] = std::exp(logw[p] - top);
      sum += weights[p];
    }
    for (auto& wgt : weights) {
      wgt /= sum;
      sum2 += wgt * wgt;
    }
    double ess = 1.0 / sum2;
    path.min_ess_fraction = std::min(path.min_ess_fraction, ess / static_cast<double>(n));
    low_ess_run = ess < 2.0 ? low_ess_run + 1 : 0;
    if (low_ess_run >= 5) throw NumericalError("spine sampler: importance weights collapsed");
    if (ess < 0.5 * static_cast<double>(n)) {
      // Systematic resampling.
      std::vector<std::vector<Point>> chosen(n);
      double u = rng.uniform() / static_cast<double>(n);
      double cumulative = weights[0];
      std::size_t j = 0;
      for (std::size_t p = 0; p < n; ++p) {
        double target = u + static_cast<double>(p) / static_cast<double>(n);
        while (cumulative < target && j + 1 < n) cumulative += weights[++j];
        chosen[p] = paths[j];
      }
      paths.swap(chosen);
      std::fill(logw.begin(), logw.end(), 0.0);
      ++path.resamples;
    }
  }
  std::size_t pick = 0;
  if (n > 1) {
    double top = *std::max_element(logw.begin(), logw.end());
    double sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) sum += (weights[p] = std::exp(logw[p] - top));
    double target = rng.uniform() * sum;
    for (pick = 0; pick + 1 < n && target >= weights[pick]; ++pick) target -= weights[pick];
  }
  path.locations = std::move(paths[pick]);
  path.log_increments.resize(K - 1);
  path.cumulative_log_y.assign(K, 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    path.log_increments[k - 1] = log_y_increment(profile, mech, h, path.times[k - 1],
                                                 path.locations[k - 1], path.times[k], path.locations[k]);
    path.cumulative_log_y[k] = path.cumulative_log_y[k - 1] + path.log_increments[k - 1];
  }
  return path;
}

}  // namespace superspine
