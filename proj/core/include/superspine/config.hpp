#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace superspine {

struct StableSection {
  double index = 1.5;
  std::string c = "1";
};

struct AtomSection {
  double y = 1.0;
  std::string rate = "1";
};

struct MechanismSection {
  std::string kind = "quadratic";  //!< quadratic | stable | quadratic_spatial | mixed
  std::string alpha = "0";
  std::string b = "1";
  std::optional<StableSection> stable;
  std::vector<AtomSection> atoms;
  double K = 100.0;
};

struct MotionSection {
  std::string kind = "brownian";  //!< brownian | drift_diffusion | killed_box | subordinate_bm
  int dim = 1;
  double sigma = 1.0;
  std::vector<std::string> drift;
  std::vector<double> box_lo, box_hi;
  double subordinator_index = 0.5;
};

struct GridSection {
  double t1 = 0.05;          //!< first profile time
  double t_max = 4.0;        //!< last profile time
  double profile_dt = 0.01;  //!< largest profile time spacing
  double dt = 0.005;         //!< sampler time step
  double solver_dt = 0.0025; //!< largest solver substep
  std::vector<double> lo, hi;
  std::vector<int> counts;   //!< empty: single point (homogeneous models)
};

struct InitialAtom {
  std::vector<double> x;
  double mass = 1.0;
};

struct McSection {
  std::size_t replicas = 5000;             //!< per side, conditioned law comparisons
  std::size_t seeds = 3;
  std::size_t null_runs = 20;
  std::size_t null_replicas = 500;
  std::size_t permutations = 199;
  std::size_t martingale_replicas = 10000;
  std::size_t fk_replicas = 20000;
  std::size_t concentration_replicas = 200;
  std::size_t z_replicas = 1000;
  std::size_t attempt_budget = 1000000;      //!< per rejection-sampled draw
};

struct TestsSection {
  std::vector<std::string> selected;
  double fk_time = 0.5;
  std::vector<double> mixture_times = {0.25, 0.75};
  double flow_t = 0.5;
  double flow_s = 0.5;
  double concentration_near = 0.05;
  double concentration_far = 0.4;
  double z_time_cap = 10.0;
  double concentration_kappa = 0.02;  //!< finer atoms so the spatial spread stays resolved
};

/*!
 * Experiment configuration (YAML). Every leaf has a default; unknown keys
 * are rejected with the line they appear on.
 */
struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  MechanismSection mechanism;
  MotionSection motion;
  GridSection grid;
  std::vector<InitialAtom> initial = {InitialAtom{}};
  double h = 1.0;
  double eps = 0.02;
  double delta = 0.01;
  double eps_factor = 0.05;
  std::optional<double> eps_n;
  double kappa = 1.0;
  std::size_t max_atoms = 2000000;
  std::size_t spine_particles = 256;
  McSection mc;
  TestsSection tests;
  std::string output_dir = "superspine-out";

  //! Source line of each key path ("grid.dt"); used to anchor validation errors.
  std::map<std::string, int> lines;
  int line_of(const std::string& path) const;
};

//! "a.b.c=value" override of a scalar leaf.
struct Override {
  std::string path;
  std::string value;
};
Override parse_override(const std::string& text);

ExperimentConfig parse_config(const std::string& yaml_text, const std::vector<Override>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<Override>& overrides = {});

//! Throws ConfigError on any violated invariant.
void validate(const ExperimentConfig& cfg);

//! Canonical echo with every default filled in; parse_config(to_json(c).dump()) == c.
nlohmann::json to_json(const ExperimentConfig& cfg);

//! Default test selection for the model kind.
std::vector<std::string> default_tests(const ExperimentConfig& cfg);

}  // namespace superspine
