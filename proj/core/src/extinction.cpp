#include "superspine/extinction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "superspine/errors.hpp"
#include "superspine/numerics.hpp"

namespace superspine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double expm1_ratio(double k, double t) {
  if (std::abs(k * t) < 1e-12) return t;
  return std::expm1(k * t) / k;
}

bool grey_fails(const LocalMechanism& m) { return !(m.b > 0.0) && !(m.stable_c > 0.0); }

// int_v^inf dz / psi(z), computed as int_0^inf v e^u / psi(v e^u) du.
double tail_integral(const LocalMechanism& m, double v) {
  return integrate_to_infinity([&](double u) {
    double z = v * std::exp(u);
    if (!std::isfinite(z)) return 0.0;
    double p = m.psi(z);
    return p > 0.0 ? z / p : 0.0;
  }, 0.0, 1e-14);
}

// int_z^{z0} d zeta / psi(zeta) in log coordinates, composite Gauss-Legendre.
double flow_time(const LocalMechanism& m, double z, double z0) {
  static const QuadratureRule rule = gauss_legendre_unit(16);
  double a = std::log(z);
  double b = std::log(z0);
  int panels = std::max(1, static_cast<int>(std::ceil((b - a) / 0.25)));
  double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double zeta = std::exp(lo + width * rule.nodes[k]);
      total += rule.weights[k] * width * zeta / m.psi(zeta);
    }
  }
  return total;
}

double rk4_flow(const LocalMechanism& m, double z0, double tau) {
  double rate = std::abs(m.psi_prime(z0)) + std::abs(m.psi(z0)) / std::max(z0, 1e-300);
  int n = std::max(1, static_cast<int>(std::ceil(tau * rate * 20.0)));
  n = std::min(n, 100000);
  double h = tau / n;
  double z = z0;
  auto f = [&](double y) { return -m.psi(std::max(y, 0.0)); };
  for (int i = 0; i < n; ++i) {
    double k1 = f(z);
    double k2 = f(z + 0.5 * h * k1);
    double k3 = f(z + 0.5 * h * k2);
    double k4 = f(z + h * k3);
    z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (z <= 0.0) return 0.0;
  }
  return z;
}

}  // namespace

double solve_v_homogeneous(const LocalMechanism& m, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("solve_v_homogeneous: t must be positive");
  if (grey_fails(m)) return kInf;
  if (m.alpha > 0.0) throw std::domain_error("solve_v_homogeneous: psi must be positive on (0, inf)");
  // F(y) = G(e^y) - t is decreasing in y = log v.
  auto F = [&](double y) { return tail_integral(m, std::exp(y)) - t; };
  double y = 0.0;
  double fy = F(y);
  double lo, hi;
  if (fy > 0.0) {
    lo = y;
    hi = y + 1.0;
    while (F(hi) > 0.0) {
      lo = hi;
      hi += 2.0;
      if (hi > 700.0) throw NumericalError("solve_v_homogeneous: v overflows");
    }
  } else {
    hi = y;
    lo = y - 1.0;
    while (F(lo) < 0.0) {
      hi = lo;
      lo -= 2.0;
      if (lo < -700.0) throw NumericalError("solve_v_homogeneous: v underflows");
    }
  }
  y = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    fy = F(y);
    if (std::abs(fy) <= 1e-13 * std::max(1.0, t)) break;
    if (fy > 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    double v = std::exp(y);
    double slope = -v / m.psi(v);
    double next = y - fy / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) < 1e-16 * std::max(1.0, std::abs(y))) {
      y = next;
      break;
    }
    y = next;
  }
  return std::exp(y);
}

double solve_v_homogeneous(const BranchingMechanism& mech, double t) {
  if (!mech.homogeneous()) throw std::invalid_argument("solve_v_homogeneous: mechanism varies in x");
  return solve_v_homogeneous(mech.at(Point{}), t);
}

double solve_w_homogeneous(const LocalMechanism& m, double t) {
  double v = solve_v_homogeneous(m, t);
  return std::isfinite(v) ? m.psi(v) : kInf;
}

double solve_w_homogeneous(const BranchingMechanism& mech, double t) {
  if (!mech.homogeneous()) throw std::invalid_argument("solve_w_homogeneous: mechanism varies in x");
  return solve_w_homogeneous(mech.at(Point{}), t);
}

bool has_closed_form(const LocalMechanism& m) {
  return m.atoms.empty() && !(m.b > 0.0 && m.stable_c > 0.0);
}

double homogeneous_v(const LocalMechanism& m, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("homogeneous_v: t must be positive");
  if (!has_closed_form(m)) return solve_v_homogeneous(m, t);
  double beta = -m.alpha;
  if (m.b > 0.0) return 1.0 / (m.b * expm1_ratio(beta, t));
  if (m.stable_c > 0.0) {
    double p = m.stable_index - 1.0;
    return std::pow(m.stable_c * p * expm1_ratio(p * beta, t), -1.0 / p);
  }
  return kInf;
}

double reaction_flow(const LocalMechanism& m, double z0, double tau) {
  if (!(z0 > 0.0) || !(tau > 0.0)) return z0;
  double beta = -m.alpha;
  if (m.atoms.empty() && !(m.stable_c > 0.0)) {
    if (!(m.b > 0.0)) return z0 * std::exp(-beta * tau);
    return z0 * std::exp(-beta * tau) / (1.0 + m.b * z0 * expm1_ratio(-beta, tau));
  }
  if (m.atoms.empty() && !(m.b > 0.0)) {
    double p = m.stable_index - 1.0;
    double y0 = std::pow(z0, -p);
    double y = y0 * std::exp(p * beta * tau) + m.stable_c * p * expm1_ratio(p * beta, tau);
    return std::pow(y, -1.0 / p);
  }
  if (m.alpha > 0.0) return rk4_flow(m, z0, tau);
  // Solve flow_time(z, z0) = tau for log z by safeguarded Newton.
  double top = std::log(z0);
  double hi = top;
  double lo = top - 1.0;
  while (flow_time(m, std::exp(lo), z0) < tau) {
    hi = lo;
    lo -= 2.0;
    if (lo < top - 1400.0) return 0.0;
  }
  double y = std::max(lo, top - tau * m.psi(z0) / z0);
  if (!(y > lo && y < hi)) y = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    double z = std::exp(y);
    double f = flow_time(m, z, z0) - tau;
    if (f > 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    double next = y + f * m.psi(z) / z;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) < 1e-15) {
      y = next;
      break;
    }
    y = next;
  }
  return std::exp(y);
}

ExtinctionProfile ExtinctionProfile::homogeneous(const BranchingMechanism& mech,
                                                 std::vector<double> report_times) {
  if (!mech.homogeneous()) throw ConfigError("closed-form profile needs a homogeneous mechanism");
  ExtinctionProfile p;
  p.mode_ = Mode::closed_form;
  p.local_ = mech.at(Point{});
  if (grey_fails(p.local_)) throw ConfigError("mechanism fails the Grey condition");
  if (p.local_.alpha > 0.0) throw ConfigError("supercritical mechanism: global extinction fails");
  p.closed_ = has_closed_form(p.local_);
  p.times_ = std::move(report_times);
  for (double t : p.times_) {
    double v = homogeneous_v(p.local_, t);
    p.v_.push_back(v);
    p.w_.push_back(p.local_.psi(v));
  }
  p.mechanism_fp_ = fingerprint(mech.describe());
  p.motion_fp_ = "any";
  return p;
}

ExtinctionProfile ExtinctionProfile::tabulated(SpatialGrid grid, std::vector<double> times,
                                               std::vector<double> v, std::vector<double> w,
                                               std::optional<Box> support,
                                               std::string mechanism_fp, std::string motion_fp) {
  if (times.size() < 2) throw std::invalid_argument("tabulated profile needs two or more times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw std::invalid_argument("profile times must be positive and increasing");
    }
  }
  if (v.size() != times.size() * grid.size() || w.size() != v.size()) {
    throw std::invalid_argument("profile table size does not match its grids");
  }
  ExtinctionProfile p;
  p.mode_ = Mode::grid;
  p.grid_ = std::move(grid);
  p.times_ = std::move(times);
  p.v_ = std::move(v);
  p.w_ = std::move(w);
  p.support_ = support;
  p.mechanism_fp_ = std::move(mechanism_fp);
  p.motion_fp_ = std::move(motion_fp);
  return p;
}

double ExtinctionProfile::t_min() const { return mode_ == Mode::closed_form ? 0.0 : times_.front(); }

double ExtinctionProfile::t_max() const { return mode_ == Mode::closed_form ? kInf : times_.back(); }

double ExtinctionProfile::lookup(const std::vector<double>& table, double t, const Point& x) const {
  double t0 = times_.front();
  double t1 = times_.back();
  if (t < t0 * (1.0 - 1e-12) || t > t1 * (1.0 + 1e-12)) {
    throw std::out_of_range("profile queried at t=" + std::to_string(t) + " outside [" +
                            std::to_string(t0) + ", " + std::to_string(t1) + "]");
  }
  if (support_ && !support_->contains(x)) return 0.0;
  t = std::clamp(t, t0, t1);
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.end() ? times_.size() - 2
                                     : static_cast<std::size_t>(it - times_.begin()) - 1;
  std::size_t n = grid_.size();
  std::span<const double> row0(table.data() + i * n, n);
  std::span<const double> row1(table.data() + (i + 1) * n, n);
  double a = grid_.interpolate_linear(row0, x);
  double b = grid_.interpolate_linear(row1, x);
  double ta = times_[i];
  double tb = times_[i + 1];
  if (a > 0.0 && b > 0.0) {
    double s = std::log(t / ta) / std::log(tb / ta);
    return std::exp(std::log(a) + s * (std::log(b) - std::log(a)));
  }
  double s = (t - ta) / (tb - ta);
  return a + s * (b - a);
}

double ExtinctionProfile::v(double t, const Point& x) const {
  if (x.cemetery) return 0.0;
  if (mode_ == Mode::closed_form) {
    if (!(t > 0.0)) throw std::out_of_range("v queried at non-positive time");
    return closed_ ? homogeneous_v(local_, t) : solve_v_homogeneous(local_, t);
  }
  return lookup(v_, t, x);
}

double ExtinctionProfile::w(double t, const Point& x) const {
  if (x.cemetery) return 0.0;
  if (mode_ == Mode::closed_form) return local_.psi(v(t, x));
  return lookup(w_, t, x);
}

double extinction_cdf(const ExtinctionProfile& profile, const ParticleMeasure& mu, double t) {
  if (mu.empty()) return 1.0;
  if (profile.mode() == ExtinctionProfile::Mode::grid && t < profile.t_min()) {
    throw std::out_of_range("extinction_cdf: t below the first grid time");
  }
  double s = mu.integrate([&](const Point& x) { return profile.v(t, x); });
  return std::exp(-s);
}

ExtinctionDraw sample_extinction_time(const ExtinctionProfile& profile, const ParticleMeasure& mu,
                                      Rng& rng) {
  if (!(mu.total_mass() > 0.0)) throw std::invalid_argument("sample_extinction_time: mu is zero");
  double u = rng.uniform();
  double target = -std::log(u);
  auto load = [&](double h) { return mu.integrate([&](const Point& x) { return profile.v(h, x); }); };
  double lo, hi;
  if (profile.homogeneous()) {
    lo = hi = 1.0;
    while (load(lo) < target) lo *= 0.5;
    while (load(hi) > target) hi *= 2.0;
  } else {
    lo = profile.t_min();
    hi = profile.t_max();
    if (load(lo) < target || load(hi) > target) {
      throw std::out_of_range("sample_extinction_time: quantile outside the profile time range");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    double mid = std::sqrt(lo * hi);
    if (load(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), u};
}

}  // namespace superspine
