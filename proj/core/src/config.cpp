#include "superspine/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "superspine/errors.hpp"
#include "superspine/field.hpp"

namespace superspine {

namespace {

const std::set<std::string> kKnownTests = {"closed_form", "csbp_exact", "martingale",
                                           "williams_law", "mixture",    "feynman_kac",
                                           "flow",        "concentration"};

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

class Reader {
 public:
  explicit Reader(ExperimentConfig& cfg) : cfg_(cfg) {}

  // Checks that every key of `node` is in `allowed` and records key lines.
  void keys(const YAML::Node& node, const std::string& prefix,
            std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) throw ConfigError("'" + prefix + "' must be a mapping", line_of(node));
    for (auto it = node.begin(); it != node.end(); ++it) {
      auto key = it->first.as<std::string>();
      bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
      std::string path = prefix.empty() ? key : prefix + "." + key;
      if (!ok) throw ConfigError("unknown key '" + path + "'", line_of(it->first));
      cfg_.lines[path] = line_of(it->first);
    }
  }

  template <class T>
  void get(const YAML::Node& node, const char* key, const std::string& path, T& out) {
    auto child = node[key];
    if (!child || child.IsNull()) return;
    try {
      out = child.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("'" + path + "' has the wrong type", line_of(child));
    }
  }

  void field(const YAML::Node& node, const char* key, const std::string& path, std::string& out) {
    get(node, key, path, out);
    try {
      (void)ScalarField::parse(out);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("'") + path + "': " + e.what(), line_of(node[key]));
    }
  }

 private:
  ExperimentConfig& cfg_;
};

void read_mechanism(Reader& r, const YAML::Node& n, MechanismSection& m) {
  r.keys(n, "mechanism", {"kind", "alpha", "b", "stable", "atoms", "K"});
  r.get(n, "kind", "mechanism.kind", m.kind);
  if (m.kind == "stable") m.b = "0";
  r.field(n, "alpha", "mechanism.alpha", m.alpha);
  r.field(n, "b", "mechanism.b", m.b);
  r.get(n, "K", "mechanism.K", m.K);
  if (auto st = n["stable"]; st && !st.IsNull()) {
    r.keys(st, "mechanism.stable", {"index", "c"});
    StableSection s;
    r.get(st, "index", "mechanism.stable.index", s.index);
    r.field(st, "c", "mechanism.stable.c", s.c);
    m.stable = s;
  }
  if (auto at = n["atoms"]; at && !at.IsNull()) {
    if (!at.IsSequence()) throw ConfigError("'mechanism.atoms' must be a list", line_of(at));
    m.atoms.clear();
    for (std::size_t i = 0; i < at.size(); ++i) {
      std::string p = "mechanism.atoms." + std::to_string(i);
      r.keys(at[i], p, {"y", "rate"});
      AtomSection a;
      r.get(at[i], "y", p + ".y", a.y);
      r.field(at[i], "rate", p + ".rate", a.rate);
      m.atoms.push_back(a);
    }
  }
}

void read_motion(Reader& r, const YAML::Node& n, MotionSection& m) {
  r.keys(n, "motion", {"kind", "dim", "sigma", "drift", "box", "subordinator_index"});
  r.get(n, "kind", "motion.kind", m.kind);
  r.get(n, "dim", "motion.dim", m.dim);
  r.get(n, "sigma", "motion.sigma", m.sigma);
  r.get(n, "subordinator_index", "motion.subordinator_index", m.subordinator_index);
  if (auto d = n["drift"]; d && !d.IsNull()) {
    if (!d.IsSequence()) throw ConfigError("'motion.drift' must be a list", line_of(d));
    m.drift.clear();
    for (std::size_t i = 0; i < d.size(); ++i) {
      std::string p = "motion.drift." + std::to_string(i);
      auto text = d[i].as<std::string>();
      try {
        (void)ScalarField::parse(text);
      } catch (const ConfigError& e) {
        throw ConfigError("'" + p + "': " + e.what(), line_of(d[i]));
      }
      m.drift.push_back(text);
    }
  }
  if (auto b = n["box"]; b && !b.IsNull()) {
    r.keys(b, "motion.box", {"lo", "hi"});
    r.get(b, "lo", "motion.box.lo", m.box_lo);
    r.get(b, "hi", "motion.box.hi", m.box_hi);
  }
}

void read_grid(Reader& r, const YAML::Node& n, GridSection& g) {
  r.keys(n, "grid", {"t1", "t_max", "profile_dt", "dt", "solver_dt", "space"});
  r.get(n, "t1", "grid.t1", g.t1);
  r.get(n, "t_max", "grid.t_max", g.t_max);
  r.get(n, "profile_dt", "grid.profile_dt", g.profile_dt);
  r.get(n, "dt", "grid.dt", g.dt);
  r.get(n, "solver_dt", "grid.solver_dt", g.solver_dt);
  if (auto sp = n["space"]; sp && !sp.IsNull()) {
    r.keys(sp, "grid.space", {"lo", "hi", "counts"});
    r.get(sp, "lo", "grid.space.lo", g.lo);
    r.get(sp, "hi", "grid.space.hi", g.hi);
    r.get(sp, "counts", "grid.space.counts", g.counts);
  }
}

void read_mc(Reader& r, const YAML::Node& n, McSection& m) {
  r.keys(n, "mc",
         {"replicas", "seeds", "null_runs", "null_replicas", "permutations", "martingale_replicas",
          "fk_replicas", "concentration_replicas", "z_replicas", "attempt_budget"});
  r.get(n, "replicas", "mc.replicas", m.replicas);
  r.get(n, "seeds", "mc.seeds", m.seeds);
  r.get(n, "null_runs", "mc.null_runs", m.null_runs);
  r.get(n, "null_replicas", "mc.null_replicas", m.null_replicas);
  r.get(n, "permutations", "mc.permutations", m.permutations);
  r.get(n, "martingale_replicas", "mc.martingale_replicas", m.martingale_replicas);
  r.get(n, "fk_replicas", "mc.fk_replicas", m.fk_replicas);
  r.get(n, "concentration_replicas", "mc.concentration_replicas", m.concentration_replicas);
  r.get(n, "z_replicas", "mc.z_replicas", m.z_replicas);
  r.get(n, "attempt_budget", "mc.attempt_budget", m.attempt_budget);
}

void read_tests(Reader& r, const YAML::Node& n, TestsSection& t) {
  r.keys(n, "tests",
         {"selected", "fk_time", "mixture_times", "flow_t", "flow_s", "concentration_near",
          "concentration_far", "z_time_cap", "concentration_kappa"});
  r.get(n, "selected", "tests.selected", t.selected);
  r.get(n, "fk_time", "tests.fk_time", t.fk_time);
  r.get(n, "mixture_times", "tests.mixture_times", t.mixture_times);
  r.get(n, "flow_t", "tests.flow_t", t.flow_t);
  r.get(n, "flow_s", "tests.flow_s", t.flow_s);
  r.get(n, "concentration_near", "tests.concentration_near", t.concentration_near);
  r.get(n, "concentration_far", "tests.concentration_far", t.concentration_far);
  r.get(n, "z_time_cap", "tests.z_time_cap", t.z_time_cap);
  r.get(n, "concentration_kappa", "tests.concentration_kappa", t.concentration_kappa);
}

// Walks `path` creating maps as needed and sets the scalar leaf.
void apply_override(YAML::Node node, const std::vector<std::string>& parts, std::size_t i,
                    const Override& o) {
  const auto& key = parts[i];
  if (node.IsSequence()) {
    std::size_t idx;
    try {
      idx = std::stoul(key);
    } catch (const std::exception&) {
      throw ConfigError("override '" + o.path + "': '" + key + "' is not a list index");
    }
    if (idx >= node.size()) throw ConfigError("override '" + o.path + "': index out of range");
    if (i + 1 == parts.size()) {
      if (node[idx].IsMap() || node[idx].IsSequence()) {
        throw ConfigError("override '" + o.path + "' does not name a scalar leaf");
      }
      node[idx] = o.value;
      return;
    }
    apply_override(node[idx], parts, i + 1, o);
    return;
  }
  if (!node.IsMap() && !node.IsNull()) {
    throw ConfigError("override '" + o.path + "' descends into a scalar");
  }
  if (i + 1 == parts.size()) {
    auto leaf = node[key];
    if (leaf && (leaf.IsMap() || leaf.IsSequence())) {
      throw ConfigError("override '" + o.path + "' does not name a scalar leaf");
    }
    node[key] = o.value;
    return;
  }
  if (!node[key] || node[key].IsNull()) node[key] = YAML::Node(YAML::NodeType::Map);
  apply_override(node[key], parts, i + 1, o);
}

bool on_grid(double t, double dt) {
  double r = t / dt;
  return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

}  // namespace

int ExperimentConfig::line_of(const std::string& path) const {
  auto it = lines.find(path);
  return it == lines.end() ? -1 : it->second;
}

Override parse_override(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + text + "' is not of the form key.path=value");
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<Override>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) {
    std::vector<std::string> parts;
    std::stringstream ss(o.path);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    if (parts.empty()) throw ConfigError("empty override path");
    apply_override(root, parts, 0, o);
  }

  ExperimentConfig cfg;
  Reader r(cfg);
  r.keys(root, "",
         {"name", "seed", "mechanism", "motion", "grid", "initial", "conditioning", "truncation",
          "particles", "spine", "mc", "tests", "output"});
  r.get(root, "name", "name", cfg.name);
  r.get(root, "seed", "seed", cfg.seed);
  if (auto n = root["mechanism"]) read_mechanism(r, n, cfg.mechanism);
  if (auto n = root["motion"]) read_motion(r, n, cfg.motion);
  if (auto n = root["grid"]) read_grid(r, n, cfg.grid);
  if (auto n = root["initial"]; n && !n.IsNull()) {
    if (!n.IsSequence()) throw ConfigError("'initial' must be a list of atoms", line_of(n));
    cfg.initial.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      std::string p = "initial." + std::to_string(i);
      r.keys(n[i], p, {"x", "mass"});
      InitialAtom a;
      a.x.assign(static_cast<std::size_t>(cfg.motion.dim), 0.0);
      r.get(n[i], "x", p + ".x", a.x);
      r.get(n[i], "mass", p + ".mass", a.mass);
      cfg.initial.push_back(a);
    }
  } else {
    cfg.initial[0].x.assign(static_cast<std::size_t>(cfg.motion.dim), 0.0);
  }
  if (auto n = root["conditioning"]) {
    r.keys(n, "conditioning", {"h", "eps"});
    r.get(n, "h", "conditioning.h", cfg.h);
    r.get(n, "eps", "conditioning.eps", cfg.eps);
  }
  if (auto n = root["truncation"]) {
    r.keys(n, "truncation", {"delta", "eps_factor", "eps_n"});
    r.get(n, "delta", "truncation.delta", cfg.delta);
    r.get(n, "eps_factor", "truncation.eps_factor", cfg.eps_factor);
    if (auto e = n["eps_n"]; e && !e.IsNull()) {
      double v = 0.0;
      r.get(n, "eps_n", "truncation.eps_n", v);
      cfg.eps_n = v;
    }
  }
  if (auto n = root["particles"]) {
    r.keys(n, "particles", {"kappa", "max_atoms"});
    r.get(n, "kappa", "particles.kappa", cfg.kappa);
    r.get(n, "max_atoms", "particles.max_atoms", cfg.max_atoms);
  }
  if (auto n = root["spine"]) {
    r.keys(n, "spine", {"particles"});
    r.get(n, "particles", "spine.particles", cfg.spine_particles);
  }
  if (auto n = root["mc"]) read_mc(r, n, cfg.mc);
  if (auto n = root["tests"]) read_tests(r, n, cfg.tests);
  if (auto n = root["output"]) {
    r.keys(n, "output", {"dir"});
    r.get(n, "dir", "output.dir", cfg.output_dir);
  }
  if (cfg.tests.selected.empty()) cfg.tests.selected = default_tests(cfg);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::vector<std::string> default_tests(const ExperimentConfig& cfg) {
  const auto& kind = cfg.mechanism.kind;
  if (kind == "quadratic") {
    return {"closed_form", "csbp_exact", "martingale", "williams_law",
            "mixture",     "feynman_kac", "flow",       "concentration"};
  }
  if (kind == "stable") return {"closed_form", "martingale", "feynman_kac", "flow"};
  return {"martingale", "feynman_kac", "flow", "concentration"};
}

void validate(const ExperimentConfig& cfg) {
  auto fail = [&](const std::string& path, const std::string& msg) {
    throw ConfigError("'" + path + "' " + msg, cfg.line_of(path));
  };
  const auto& m = cfg.mechanism;
  const auto& mo = cfg.motion;
  const auto& g = cfg.grid;
  const auto d = static_cast<std::size_t>(mo.dim);

  static const std::set<std::string> mech_kinds = {"quadratic", "stable", "quadratic_spatial", "mixed"};
  if (!mech_kinds.count(m.kind)) fail("mechanism.kind", "must be one of quadratic, stable, quadratic_spatial, mixed");
  bool constant_coeffs = ScalarField::parse(m.alpha).is_constant() && ScalarField::parse(m.b).is_constant();
  if (m.stable) constant_coeffs = constant_coeffs && ScalarField::parse(m.stable->c).is_constant();
  for (const auto& a : m.atoms) constant_coeffs = constant_coeffs && ScalarField::parse(a.rate).is_constant();
  bool jumps = m.stable.has_value() || !m.atoms.empty();
  if (m.kind == "quadratic" && (!constant_coeffs || jumps)) {
    fail("mechanism.kind", "'quadratic' needs constant alpha, b and no Levy kernel");
  }
  if (m.kind == "stable" && (!constant_coeffs || !m.stable || !m.atoms.empty())) {
    fail("mechanism.kind", "'stable' needs a constant stable kernel and no atoms");
  }
  if (m.kind == "quadratic_spatial" && jumps) fail("mechanism.kind", "'quadratic_spatial' has no Levy kernel");
  if (m.stable && !(m.stable->index > 1.0 && m.stable->index < 2.0)) {
    fail("mechanism.stable.index", "must lie in (1, 2)");
  }
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    if (!(m.atoms[i].y > 0.0)) fail("mechanism.atoms." + std::to_string(i) + ".y", "must be positive");
  }
  if (!(m.K > 0.0)) fail("mechanism.K", "must be positive");

  static const std::set<std::string> motion_kinds = {"brownian", "drift_diffusion", "killed_box", "subordinate_bm"};
  if (!motion_kinds.count(mo.kind)) fail("motion.kind", "must be one of brownian, drift_diffusion, killed_box, subordinate_bm");
  if (mo.dim < 1 || mo.dim > 3) fail("motion.dim", "must be 1, 2 or 3");
  if (!(mo.sigma > 0.0)) fail("motion.sigma", "must be positive");
  if (mo.kind == "drift_diffusion" && mo.drift.size() != d) fail("motion.drift", "needs one field per dimension");
  if (mo.kind == "killed_box") {
    if (mo.box_lo.size() != d || mo.box_hi.size() != d) fail("motion.box", "needs lo and hi per dimension");
    for (std::size_t i = 0; i < d; ++i) {
      if (!(mo.box_lo[i] < mo.box_hi[i])) fail("motion.box", "needs lo < hi");
    }
  }
  if (mo.kind == "subordinate_bm" && !(mo.subordinator_index > 0.0 && mo.subordinator_index < 1.0)) {
    fail("motion.subordinator_index", "must lie in (0, 1)");
  }

  if (!(g.dt > 0.0)) fail("grid.dt", "must be positive");
  if (!(g.solver_dt > 0.0)) fail("grid.solver_dt", "must be positive");
  if (!(g.profile_dt > 0.0)) fail("grid.profile_dt", "must be positive");
  if (!(g.t1 > 0.0)) fail("grid.t1", "must be positive");
  if (!(g.t_max > g.t1)) fail("grid.t_max", "must exceed grid.t1");
  bool homogeneous = constant_coeffs;
  if (!g.counts.empty() || !g.lo.empty() || !g.hi.empty()) {
    if (g.counts.size() != d || g.lo.size() != d || g.hi.size() != d) {
      fail("grid.space", "needs lo, hi and counts per dimension");
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (!(g.lo[i] < g.hi[i])) fail("grid.space", "needs lo < hi");
      if (g.counts[i] < 2) fail("grid.space.counts", "must be at least 2");
    }
  } else if (!homogeneous) {
    fail("grid.space", "is required for spatially varying mechanisms");
  }
  if (!homogeneous) {
    if (g.t1 > g.dt * (1.0 + 1e-9)) fail("grid.t1", "must not exceed grid.dt for spatial models");
    if (g.t_max < cfg.h) fail("grid.t_max", "must cover the conditioning time h");
    if (cfg.delta < g.t1) fail("truncation.delta", "must be at least grid.t1 for spatial models");
  }

  if (!(cfg.h > 0.0) || !on_grid(cfg.h, g.dt)) fail("conditioning.h", "must be a positive multiple of grid.dt");
  if (!(cfg.eps >= g.dt * (1.0 - 1e-9)) || !on_grid(cfg.eps, g.dt)) {
    fail("conditioning.eps", "must be a multiple of grid.dt and at least grid.dt");
  }
  if (!(cfg.delta >= g.dt * (1.0 - 1e-9))) fail("truncation.delta", "must be at least grid.dt");
  if (!(cfg.delta < cfg.h)) fail("truncation.delta", "must be below h");
  for (double q : {0.25, 0.5, 0.75}) {
    if (!on_grid(q * cfg.h, g.dt)) fail("conditioning.h", "quarter points of h must lie on the grid");
  }
  for (double t : cfg.tests.mixture_times) {
    if (!(t > 0.0) || !on_grid(t, g.dt)) fail("tests.mixture_times", "must be positive multiples of grid.dt");
  }
  if (!on_grid(cfg.tests.fk_time, g.dt) || !(cfg.tests.fk_time > 0.0)) fail("tests.fk_time", "must be a positive multiple of grid.dt");
  if (!on_grid(cfg.tests.flow_t, g.dt) || !(cfg.tests.flow_t > 0.0)) fail("tests.flow_t", "must be a positive multiple of grid.dt");
  if (!on_grid(cfg.tests.flow_s, g.dt) || !(cfg.tests.flow_s > 0.0)) fail("tests.flow_s", "must be a positive multiple of grid.dt");
  if (!homogeneous && cfg.tests.flow_s + cfg.tests.flow_t > g.t_max) fail("tests.flow_t", "flow_s + flow_t exceeds grid.t_max");
  if (!(cfg.tests.concentration_near > 0.0 && cfg.tests.concentration_near < cfg.tests.concentration_far)) {
    fail("tests.concentration_near", "must be positive and below concentration_far");
  }
  if (!(cfg.tests.concentration_kappa > 0.0)) fail("tests.concentration_kappa", "must be positive");
  if (!(cfg.eps_factor > 0.0)) fail("truncation.eps_factor", "must be positive");
  if (cfg.eps_n && !(*cfg.eps_n > 0.0)) fail("truncation.eps_n", "must be positive");
  if (!(cfg.kappa > 0.0)) fail("particles.kappa", "must be positive");
  if (cfg.max_atoms < 1) fail("particles.max_atoms", "must be at least 1");
  if (cfg.spine_particles < 1) fail("spine.particles", "must be at least 1");
  const auto& mc = cfg.mc;
  for (auto [v, p] : {std::pair{mc.replicas, "mc.replicas"}, {mc.seeds, "mc.seeds"},
                      {mc.permutations, "mc.permutations"}, {mc.martingale_replicas, "mc.martingale_replicas"},
                      {mc.fk_replicas, "mc.fk_replicas"}, {mc.concentration_replicas, "mc.concentration_replicas"},
                      {mc.z_replicas, "mc.z_replicas"}, {mc.attempt_budget, "mc.attempt_budget"},
                      {mc.null_replicas, "mc.null_replicas"}}) {
    if (v < 1) fail(p, "must be at least 1");
  }
  if (cfg.initial.empty()) fail("initial", "needs at least one atom");
  for (std::size_t i = 0; i < cfg.initial.size(); ++i) {
    std::string p = "initial." + std::to_string(i);
    if (cfg.initial[i].x.size() != d) fail(p + ".x", "must have motion.dim coordinates");
    if (!(cfg.initial[i].mass > 0.0)) fail(p + ".mass", "must be positive");
  }
  for (const auto& t : cfg.tests.selected) {
    if (!kKnownTests.count(t)) fail("tests.selected", "names unknown test '" + t + "'");
  }
  if (cfg.output_dir.empty()) fail("output.dir", "must not be empty");
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  using nlohmann::json;
  const auto& m = cfg.mechanism;
  json mech = {{"kind", m.kind}, {"alpha", m.alpha}, {"b", m.b}, {"K", m.K}};
  mech["stable"] = m.stable ? json{{"index", m.stable->index}, {"c", m.stable->c}} : json(nullptr);
  mech["atoms"] = json::array();
  for (const auto& a : m.atoms) mech["atoms"].push_back({{"y", a.y}, {"rate", a.rate}});
  const auto& mo = cfg.motion;
  json motion = {{"kind", mo.kind},   {"dim", mo.dim},
                 {"sigma", mo.sigma}, {"drift", mo.drift},
                 {"subordinator_index", mo.subordinator_index}};
  motion["box"] = mo.box_lo.empty() ? json(nullptr) : json{{"lo", mo.box_lo}, {"hi", mo.box_hi}};
  const auto& g = cfg.grid;
  json grid = {{"t1", g.t1}, {"t_max", g.t_max}, {"profile_dt", g.profile_dt}, {"dt", g.dt},
               {"solver_dt", g.solver_dt}};
  grid["space"] = g.counts.empty() ? json(nullptr) : json{{"lo", g.lo}, {"hi", g.hi}, {"counts", g.counts}};
  json initial = json::array();
  for (const auto& a : cfg.initial) initial.push_back({{"x", a.x}, {"mass", a.mass}});
  const auto& mc = cfg.mc;
  json mcj = {{"replicas", mc.replicas},
              {"seeds", mc.seeds},
              {"null_runs", mc.null_runs},
              {"null_replicas", mc.null_replicas},
              {"permutations", mc.permutations},
              {"martingale_replicas", mc.martingale_replicas},
              {"fk_replicas", mc.fk_replicas},
              {"concentration_replicas", mc.concentration_replicas},
              {"z_replicas", mc.z_replicas},
              {"attempt_budget", mc.attempt_budget}};
  const auto& t = cfg.tests;
  json tests = {{"selected", t.selected},
                {"fk_time", t.fk_time},
                {"mixture_times", t.mixture_times},
                {"flow_t", t.flow_t},
                {"flow_s", t.flow_s},
                {"concentration_near", t.concentration_near},
                {"concentration_far", t.concentration_far},
                {"z_time_cap", t.z_time_cap},
                {"concentration_kappa", t.concentration_kappa}};
  json truncation = {{"delta", cfg.delta}, {"eps_factor", cfg.eps_factor}};
  truncation["eps_n"] = cfg.eps_n ? json(*cfg.eps_n) : json(nullptr);
  return {{"name", cfg.name},
          {"seed", cfg.seed},
          {"mechanism", mech},
          {"motion", motion},
          {"grid", grid},
          {"initial", initial},
          {"conditioning", {{"h", cfg.h}, {"eps", cfg.eps}}},
          {"truncation", truncation},
          {"particles", {{"kappa", cfg.kappa}, {"max_atoms", cfg.max_atoms}}},
          {"spine", {{"particles", cfg.spine_particles}}},
          {"mc", mcj},
          {"tests", tests},
          {"output", {{"dir", cfg.output_dir}}}};
}

}  // namespace superspine
