#include "superspine/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "superspine/errors.hpp"
#include "superspine/numerics.hpp"

namespace superspine {

namespace {

Interval bounded_range(const ScalarField& f, const char* what) {
  auto r = f.range();
  if (!r) throw ConfigError(std::string(what) + " must be bounded (wrap it in clamp)");
  return *r;
}

}  // namespace

BranchingMechanism build_mechanism(const MechanismSection& m) {
  LevyKernel levy;
  if (m.stable && !m.atoms.empty()) {
    throw ConfigError("mechanism: a stable kernel and atoms cannot be combined");
  }
  if (m.stable) levy = StableKernel{m.stable->index, ScalarField::parse(m.stable->c)};
  if (!m.atoms.empty()) {
    AtomKernel k;
    for (const auto& a : m.atoms) {
      k.sizes.push_back(a.y);
      k.rates.push_back(ScalarField::parse(a.rate));
    }
    levy = k;
  }
  return BranchingMechanism(ScalarField::parse(m.alpha), ScalarField::parse(m.b), levy, m.K);
}

MotionModel build_motion(const MotionSection& m) {
  if (m.kind == "brownian") return MotionModel::brownian(m.dim, m.sigma);
  if (m.kind == "drift_diffusion") {
    std::vector<ScalarField> drift;
    for (const auto& d : m.drift) drift.push_back(ScalarField::parse(d));
    return MotionModel::drift_diffusion(m.dim, m.sigma, drift);
  }
  if (m.kind == "killed_box") {
    Box box;
    box.dim = m.dim;
    for (int i = 0; i < m.dim; ++i) {
      box.lo[i] = m.box_lo[i];
      box.hi[i] = m.box_hi[i];
    }
    return MotionModel::killed_box(m.dim, m.sigma, box);
  }
  if (m.kind == "subordinate_bm") return MotionModel::subordinate_bm(m.dim, m.subordinator_index);
  throw ConfigError("unknown motion kind '" + m.kind + "'");
}

SpatialGrid build_grid(const GridSection& g, int dim) {
  if (g.counts.empty()) return SpatialGrid();
  std::array<double, kMaxDim> lo{}, hi{};
  std::array<int, kMaxDim> counts{};
  counts.fill(1);
  for (int i = 0; i < dim; ++i) {
    lo[i] = g.lo[i];
    hi[i] = g.hi[i];
    counts[i] = g.counts[i];
  }
  return SpatialGrid(dim, lo, hi, counts);
}

LocalMechanism dominating_mechanism(const BranchingMechanism& mech) {
  LocalMechanism d;
  auto alpha = bounded_range(mech.alpha(), "mechanism.alpha");
  auto b = bounded_range(mech.b(), "mechanism.b");
  if (alpha.hi > 0.0) throw ConfigError("mechanism.alpha must be nonpositive (subcritical or critical)");
  d.alpha = alpha.hi;
  d.b = std::max(b.lo, 0.0);
  if (const auto* st = std::get_if<StableKernel>(&mech.levy())) {
    d.stable_c = std::max(bounded_range(st->strength, "mechanism.stable.c").lo, 0.0);
    d.stable_index = st->index;
  }
  if (!(d.b > 0.0) && !(d.stable_c > 0.0)) {
    throw ConfigError("mechanism needs b or the stable strength bounded away from 0 for a Grey lower bound");
  }
  return d;
}

std::vector<double> profile_times(const GridSection& g) {
  std::vector<double> times;
  double t = g.t1;
  while (t < g.t_max * (1.0 - 1e-12)) {
    times.push_back(t);
    t += std::min(g.profile_dt, 0.1 * t);
  }
  times.push_back(g.t_max);
  return times;
}

Model build_model(const ExperimentConfig& cfg, bool with_profile) {
  validate(cfg);
  Model m;
  m.config = cfg;
  m.mechanism = build_mechanism(cfg.mechanism);
  m.motion = build_motion(cfg.motion);
  m.homogeneous = m.mechanism.homogeneous();
  m.grid = m.homogeneous ? SpatialGrid() : build_grid(cfg.grid, cfg.motion.dim);
  m.mechanism.validate(m.grid.points());
  for (const auto& a : cfg.initial) {
    Point p;
    for (std::size_t i = 0; i < a.x.size(); ++i) p.x[i] = a.x[i];
    m.mu.add(p, a.mass);
  }
  m.particles.kappa = cfg.kappa;
  m.particles.max_atoms = cfg.max_atoms;
  m.solver.dt = cfg.grid.solver_dt;
  m.williams.dt = cfg.grid.dt;
  m.williams.delta = cfg.delta;
  m.williams.eps_factor = cfg.eps_factor;
  m.williams.eps_n = cfg.eps_n;
  m.williams.spine_particles = cfg.spine_particles;
  m.williams.max_rejections = cfg.mc.attempt_budget;
  m.williams.particles = m.particles;
  if (!m.homogeneous) m.dominating = dominating_mechanism(m.mechanism);
  if (with_profile) {
    if (m.homogeneous) {
      m.profile = ExtinctionProfile::homogeneous(m.mechanism);
    } else {
      m.profile = solve_vw_spatial(m.mechanism, m.motion, m.grid, profile_times(cfg.grid),
                                   *m.dominating, m.solver);
    }
    m.has_profile = true;
  }
  return m;
}

std::string config_fingerprint(const ExperimentConfig& cfg) { return fingerprint(to_json(cfg).dump()); }

}  // namespace superspine
