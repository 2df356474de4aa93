#include "superspine/transition.hpp"

#include <cmath>
#include <stdexcept>

namespace superspine {

namespace {

// (e^{k t} - 1) / k, continuous at k = 0.
double expm1_ratio(double k, double t) {
  if (std::abs(k * t) < 1e-12) return t;
  return std::expm1(k * t) / k;
}

double zolotarev(double beta, double u) {
  return std::pow(std::pow(std::sin(beta * u), beta) *
                      std::pow(std::sin((1.0 - beta) * u), 1.0 - beta) / std::sin(u),
                  1.0 / (1.0 - beta));
}

}  // namespace

double sample_csbp_exact(double b, double m, double t, Rng& rng) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_csbp_exact: t must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("sample_csbp_exact: b must be positive");
  if (!(m > 0.0)) return 0.0;
  auto n = rng.poisson(m / (b * t));
  if (n == 0) return 0.0;
  return rng.gamma(static_cast<double>(n)) * b * t;
}

double sample_stable_cluster(double beta, Rng& rng) {
  const double expo = (1.0 - beta) / beta;
  const double a0 = std::pow(std::pow(beta, beta) * std::pow(1.0 - beta, 1.0 - beta),
                             1.0 / (1.0 - beta));
  double u;
  for (;;) {
    u = M_PI * rng.uniform();
    if (rng.uniform() <= std::pow(a0 / zolotarev(beta, u), expo)) break;
  }
  double g = rng.gamma(1.0 / beta);
  double s = std::pow(zolotarev(beta, u) / g, expo);
  return s * std::pow(rng.exponential(), 1.0 / beta);
}

void MassTransition::quadratic(double beta, double b, double mass, double dt, Rng& rng,
                               std::vector<double>& out) const {
  if (!(mass > 0.0)) return;
  double decay = std::exp(-beta * dt);
  if (!(b > 0.0)) {
    out.push_back(mass * decay);
    return;
  }
  // X_t = e^{-beta t} Y_tau with Y critical and tau = (e^{beta t} - 1) / beta.
  double scale = b * expm1_ratio(beta, dt);
  auto n = rng.poisson(mass / scale);
  if (n == 0) return;
  double piece = scale * decay;
  auto group = static_cast<std::uint64_t>(std::max(1.0, std::floor(group_mass_ / piece)));
  while (n > 0) {
    auto k = std::min(n, group);
    out.push_back(rng.gamma(static_cast<double>(k)) * piece);
    n -= k;
  }
}

void MassTransition::stable(double beta, double c, double index, double mass, double dt, Rng& rng,
                            std::vector<double>& out) const {
  if (!(mass > 0.0)) return;
  double decay = std::exp(-beta * dt);
  if (!(c > 0.0)) {
    out.push_back(mass * decay);
    return;
  }
  double p = index - 1.0;
  // X_t = e^{-beta t} Y_tau, tau = (e^{p beta t} - 1)/(p beta), Y pure stable.
  double kappa = c * p * expm1_ratio(p * beta, dt);
  double rate = std::pow(kappa, -1.0 / p);
  double jump_scale = std::pow(kappa, 1.0 / p) * decay;
  auto n = rng.poisson(mass * rate);
  double acc = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    acc += jump_scale * sample_stable_cluster(p, rng);
    if (acc >= group_mass_) {
      out.push_back(acc);
      acc = 0.0;
    }
  }
  if (acc > 0.0) out.push_back(acc);
}

double MassTransition::atoms(const std::vector<std::pair<double, double>>& atoms, double mass,
                             double dt, Rng& rng) {
  double total_rate = 0.0;
  for (const auto& [y, r] : atoms) total_rate += r;
  if (!(total_rate > 0.0) || !(mass > 0.0)) return mass;
  double t = 0.0;
  for (;;) {
    t += rng.exponential() / (mass * total_rate);
    if (t > dt) return mass;
    double pick = rng.uniform() * total_rate;
    for (const auto& [y, r] : atoms) {
      if (pick < r) {
        mass += y;
        break;
      }
      pick -= r;
    }
  }
}

void MassTransition::apply(const LocalMechanism& m, double mass, double dt, Rng& rng,
                           std::vector<double>& pieces) const {
  pieces.clear();
  if (!(mass > 0.0)) return;
  double compensator = 0.0;
  for (const auto& [y, r] : m.atoms) compensator += r * y;
  double beta = -m.alpha + compensator;
  bool has_stable = m.stable_c > 0.0;

  if (has_stable && m.b > 0.0) {
    std::vector<double> first;
    quadratic(beta, m.b, mass, dt, rng, first);
    for (double piece : first) stable(0.0, m.stable_c, m.stable_index, piece, dt, rng, pieces);
  } else if (has_stable) {
    stable(beta, m.stable_c, m.stable_index, mass, dt, rng, pieces);
  } else {
    quadratic(beta, m.b, mass, dt, rng, pieces);
  }
  if (!m.atoms.empty()) {
    for (double& piece : pieces) piece = atoms(m.atoms, piece, dt, rng);
  }
}

}  // namespace superspine
