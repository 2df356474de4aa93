#include "superspine/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "superspine/errors.hpp"
#include "superspine/numerics.hpp"

namespace superspine {

namespace {

int default_hermite_order(int dim) {
  switch (dim) {
    case 1: return 20;
    case 2: return 10;
    default: return 6;
  }
}

// Equal-probability quantile nodes of the subordinator at time 1.
std::vector<double> subordinator_quantiles(const MotionModel& motion, int count) {
  std::vector<double> s(count);
  if (motion.subordinator_index() == 0.5) {
    // S = 1/(2 N^2): P(S <= s) = P(|N| >= 1/sqrt(2 s)).
    for (int j = 0; j < count; ++j) {
      double p = (j + 0.5) / count;
      double q = normal_quantile(1.0 - 0.5 * p);
      s[j] = 1.0 / (2.0 * q * q);
    }
    return s;
  }
  Rng rng(0x5eed5ab0d1ce5ULL);
  std::vector<double> sample(1 << 18);
  for (auto& x : sample) x = motion.sample_subordinator(rng);
  std::sort(sample.begin(), sample.end());
  for (int j = 0; j < count; ++j) {
    auto k = static_cast<std::size_t>((j + 0.5) / count * sample.size());
    s[j] = sample[std::min(k, sample.size() - 1)];
  }
  return s;
}

}  // namespace

MildSolver::MildSolver(const BranchingMechanism& mech, const MotionModel& motion,
                       const SpatialGrid& grid, SolverControls controls)
    : motion_(motion), grid_(grid), controls_(controls) {
  if (!(controls_.dt > 0.0)) throw ConfigError("solver dt must be positive");
  if (!grid_.singleton() && grid_.dim() != motion_.dim()) {
    throw ConfigError("spatial grid dimension differs from the motion dimension");
  }
  if (grid_.singleton() && !motion_.conservative()) {
    throw ConfigError("a killed motion needs a spatial grid");
  }
  points_ = grid_.points();
  locals_.reserve(points_.size());
  outside_.assign(points_.size(), 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    locals_.push_back(mech.at(points_[i]));
    if (motion_.kind() == MotionKind::killed_box && !motion_.box().contains(points_[i])) outside_[i] = 1;
  }
  if (motion_.kind() == MotionKind::drift_diffusion) {
    drift_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      for (int k = 0; k < motion_.dim(); ++k) drift_[i][k] = motion_.drift()[k](points_[i]);
    }
  }
  if (grid_.singleton()) return;

  int dim = motion_.dim();
  int order = controls_.hermite_order > 0 ? controls_.hermite_order : default_hermite_order(dim);
  if (motion_.kind() == MotionKind::subordinate_bm) order = std::max(4, order / 2);
  auto gh = gauss_hermite_normal(order);
  int total = 1;
  for (int k = 0; k < dim; ++k) total *= order;
  std::vector<UnitNode> gaussian;
  for (int idx = 0; idx < total; ++idx) {
    UnitNode node;
    node.weight = 1.0;
    int rest = idx;
    for (int k = 0; k < dim; ++k) {
      int j = rest % order;
      rest /= order;
      node.z[k] = gh.nodes[j];
      node.weight *= gh.weights[j];
    }
    gaussian.push_back(node);
  }
  if (motion_.kind() == MotionKind::subordinate_bm) {
    auto s = subordinator_quantiles(motion_, controls_.subordinator_nodes);
    for (double sj : s) {
      for (auto node : gaussian) {
        node.s = sj;
        node.weight /= static_cast<double>(s.size());
        nodes_.push_back(node);
      }
    }
  } else {
    nodes_ = std::move(gaussian);
  }
}

void MildSolver::diffuse(GridField& u, double tau) const {
  if (grid_.singleton()) return;
  const int dim = motion_.dim();
  const bool killed = motion_.kind() == MotionKind::killed_box;
  const bool subordinate = motion_.kind() == MotionKind::subordinate_bm;
  const double gauss_scale = motion_.sigma() * std::sqrt(tau);
  const double time_scale = subordinate ? std::pow(tau, 1.0 / motion_.subordinator_index()) : 0.0;
  GridField out(u.size(), 0.0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (outside_[i]) continue;
    double total = 0.0;
    for (const auto& node : nodes_) {
      Point y = points_[i];
      double scale = subordinate ? std::sqrt(2.0 * time_scale * node.s) : gauss_scale;
      for (int k = 0; k < dim; ++k) {
        y.x[k] += scale * node.z[k];
        if (!drift_.empty()) y.x[k] += drift_[i][k] * tau;
      }
      if (killed && !motion_.box().contains(y)) continue;
      total += node.weight * grid_.interpolate_cubic(u, y);
    }
    out[i] = total;
  }
  u.swap(out);
}

void MildSolver::react(GridField& u, double tau, GridField* tangent) const {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (outside_[i]) {
      u[i] = 0.0;
      if (tangent) (*tangent)[i] = 0.0;
      continue;
    }
    const auto& m = locals_[i];
    double z0 = u[i];
    double z1 = reaction_flow(m, z0, tau);
    if (tangent && z0 > 0.0) {
      double p0 = m.psi(z0);
      double factor;
      if (std::abs(p0) > 1e-300 * z0) {
        factor = m.psi(z1) / p0;
      } else {
        double h = 1e-6 * z0;
        factor = (reaction_flow(m, z0 + h, tau) - reaction_flow(m, z0 - h, tau)) / (2.0 * h);
      }
      (*tangent)[i] *= factor;
    }
    u[i] = z1;
  }
}

bool MildSolver::step(GridField& u, double tau, GridField* tangent) const {
  GridField next = u;
  GridField next_tangent;
  GridField* tp = nullptr;
  if (tangent) {
    next_tangent = *tangent;
    tp = &next_tangent;
  }
  react(next, 0.5 * tau, tp);
  diffuse(next, tau);
  if (tp) diffuse(*tp, tau);
  react(next, 0.5 * tau, tp);
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (!std::isfinite(next[i]) || next[i] < 0.0) return false;
    if (tp && (!std::isfinite((*tp)[i]) || (*tp)[i] < 0.0)) return false;
  }
  u.swap(next);
  if (tangent) tangent->swap(next_tangent);
  return true;
}

void MildSolver::advance(GridField& u, double duration, GridField* tangent) const {
  if (!(duration > 0.0)) return;
  auto n = static_cast<std::size_t>(std::ceil(duration / controls_.dt - 1e-9));
  n = std::max<std::size_t>(n, 1);
  double tau = duration / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    int level = 0;
    while (true) {
      std::size_t pieces = std::size_t{1} << level;
      GridField trial = u;
      GridField trial_tangent = tangent ? *tangent : GridField{};
      bool ok = true;
      for (std::size_t p = 0; p < pieces && ok; ++p) {
        ok = step(trial, tau / static_cast<double>(pieces), tangent ? &trial_tangent : nullptr);
      }
      if (ok) {
        u.swap(trial);
        if (tangent) tangent->swap(trial_tangent);
        break;
      }
      if (++level > controls_.max_halvings) {
        throw NumericalError("mild solver: step failed after " +
                             std::to_string(controls_.max_halvings) + " halvings");
      }
      ++halvings_;
    }
  }
}

GridField solve_u_f(const BranchingMechanism& mech, const MotionModel& motion, const ScalarField& f,
                    double t, const SpatialGrid& grid, const SolverControls& controls) {
  if (!(t > 0.0)) throw std::invalid_argument("solve_u_f: t must be positive");
  if (!f.bound()) throw std::invalid_argument("solve_u_f: f must be bounded");
  MildSolver solver(mech, motion, grid, controls);
  GridField u(grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = solver.outside(i) ? 0.0 : f(solver.points()[i]);
    if (u[i] < 0.0) throw std::invalid_argument("solve_u_f: f must be nonnegative");
  }
  solver.advance(u, t);
  return u;
}

ExtinctionProfile solve_vw_spatial(const BranchingMechanism& mech, const MotionModel& motion,
                                   const SpatialGrid& grid, const std::vector<double>& times,
                                   const LocalMechanism& dominating, const SolverControls& controls) {
  if (times.size() < 2) throw ConfigError("profile needs at least two grid times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw ConfigError("profile times must be positive and increasing");
    }
  }
  if (!(dominating.b > 0.0) && !(dominating.stable_c > 0.0)) {
    throw ConfigError("dominating mechanism fails the Grey condition");
  }
  MildSolver solver(mech, motion, grid, controls);
  const auto& points = solver.points();
  const std::size_t n = points.size();

  static const double probes[] = {1e-2, 1e-1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5};
  for (std::size_t i = 0; i < n; ++i) {
    if (solver.outside(i)) continue;
    for (double z : probes) {
      double lower = dominating.psi(z);
      if (solver.locals()[i].psi(z) < lower - 1e-10 * std::max(1.0, std::abs(lower))) {
        std::ostringstream os;
        os << "mechanism does not dominate the declared lower bound at grid point " << i
           << " (z=" << z << ")";
        throw ConfigError(os.str());
      }
    }
  }

  const double t1 = times.front();
  const double tau0 = std::min(controls.bootstrap_time, 0.25 * t1);
  const double v_cap = homogeneous_v(dominating, tau0);
  GridField v(n, 0.0);
  GridField w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (solver.outside(i)) continue;
    const auto& m = solver.locals()[i];
    double local = std::numeric_limits<double>::infinity();
    try {
      local = homogeneous_v(m, tau0);
    } catch (const std::exception&) {
    }
    if (local < v_cap) {
      v[i] = local;
      w[i] = m.psi(local);
    } else {
      v[i] = v_cap;
      w[i] = dominating.psi(v_cap);
    }
  }

  ProfileDiagnostics diag;
  diag.bootstrap_time = tau0;
  auto take_step = [&](double tau) {
    GridField before = v;
    solver.advance(v, tau, &w);
    ++diag.substeps;
    return before;
  };

  // Leave the singular layer geometrically, then two uniform steps onto t1.
  double tau_first = std::min(controls.dt, 0.25 * t1);
  double t_switch = t1 - 2.0 * tau_first;
  if (t_switch > tau0) {
    double ratio = t_switch / tau0;
    auto k = static_cast<std::size_t>(std::ceil(std::log(ratio) / std::log1p(controls.growth)));
    k = std::max<std::size_t>(k, 1);
    double t = tau0;
    for (std::size_t j = 1; j <= k; ++j) {
      double next = j == k ? t_switch : tau0 * std::pow(ratio, static_cast<double>(j) / k);
      take_step(next - t);
      t = next;
    }
  }
  if (t_switch > tau0) {
    take_step(tau_first);
  } else {
    take_step(t1 - tau_first - tau0);
  }

  const std::size_t m = times.size();
  std::vector<double> v_table(m * n), w_fd(m * n), w_fk(m * n);
  GridField prev = take_step(tau_first);
  double tau_prev = tau_first;
  for (std::size_t k = 0; k < m; ++k) {
    std::copy(v.begin(), v.end(), v_table.begin() + k * n);
    std::copy(w.begin(), w.end(), w_fk.begin() + k * n);
    double span = k + 1 < m ? times[k + 1] - times[k] : times[k] - times[k - 1];
    auto substeps = std::max<std::size_t>(
        static_cast<std::size_t>(std::ceil(span / controls.dt - 1e-9)), 1);
    double tau = span / static_cast<double>(substeps);
    GridField current = take_step(tau);
    // Three-point derivative on the stencil (t - a, t, t + b).
    double a = tau_prev;
    double b = tau;
    for (std::size_t i = 0; i < n; ++i) {
      double d = -b / (a * (a + b)) * prev[i] + (b - a) / (a * b) * current[i] +
                 a / (b * (a + b)) * v[i];
      w_fd[k * n + i] = -d;
    }
    if (k + 1 < m) {
      GridField last = current;
      for (std::size_t s = 1; s < substeps; ++s) last = take_step(tau);
      prev = std::move(last);
      tau_prev = tau;
    }
  }

  std::vector<double> w_table(m * n);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx = k * n + i;
      double fd = w_fd[idx];
      double fk = w_fk[idx];
      double scale = std::max(std::abs(fk), 1e-300);
      double gap = std::abs(fd - fk) / scale;
      if (fk > 0.0) diag.max_w_discrepancy = std::max(diag.max_w_discrepancy, gap);
      if (fd >= 0.0 && gap <= 0.05) {
        w_table[idx] = fd;
      } else {
        w_table[idx] = fk;
        if (fk > 0.0 || fd != 0.0) ++diag.tie_break_points;
      }
      if (!std::isfinite(w_table[idx])) throw NumericalError("w is not finite on the grid");
      if (k > 0) {
        double before = v_table[(k - 1) * n + i];
        if (v_table[idx] > before * (1.0 + controls.monotone_tolerance) + 1e-300) {
          std::ostringstream os;
          os << "v is not decreasing in t at t=" << times[k] << ", grid point " << i << " ("
             << before << " -> " << v_table[idx] << ")";
          throw NumericalError(os.str());
        }
      }
    }
  }
  diag.step_halvings = solver.halvings();

  std::optional<Box> support;
  if (motion.kind() == MotionKind::killed_box) support = motion.box();
  auto profile = ExtinctionProfile::tabulated(grid, times, std::move(v_table), std::move(w_table),
                                              support, fingerprint(mech.describe()),
                                              fingerprint(motion.describe()));
  profile.diagnostics = diag;
  return profile;
}

}  // namespace superspine
