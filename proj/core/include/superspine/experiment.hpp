#pragma once

#include <optional>
#include <string>
#include <vector>

#include "superspine/config.hpp"
#include "superspine/extinction.hpp"
#include "superspine/grid.hpp"
#include "superspine/measure.hpp"
#include "superspine/mechanism.hpp"
#include "superspine/motion.hpp"
#include "superspine/sampler.hpp"
#include "superspine/solver.hpp"
#include "superspine/williams.hpp"

namespace superspine {

//! Everything a run needs, built from one configuration.
struct Model {
  ExperimentConfig config;
  BranchingMechanism mechanism;
  MotionModel motion;
  SpatialGrid grid;
  ParticleMeasure mu;
  ParticleControls particles;
  SolverControls solver;
  WilliamsControls williams;
  std::optional<LocalMechanism> dominating;  //!< homogeneous lower bound (spatial models)
  ExtinctionProfile profile;
  bool homogeneous = true;
  bool has_profile = false;

  SuperprocessStepper stepper() const { return SuperprocessStepper(mechanism, motion, particles); }
};

BranchingMechanism build_mechanism(const MechanismSection& m);
MotionModel build_motion(const MotionSection& m);
SpatialGrid build_grid(const GridSection& g, int dim);
//! Homogeneous mechanism bounding psi(x, .) from below over the grid.
LocalMechanism dominating_mechanism(const BranchingMechanism& mech);
//! Profile times: 10% geometric growth from t1 until the spacing reaches profile_dt.
std::vector<double> profile_times(const GridSection& g);

//! Build the model; the profile is solved unless with_profile is false.
Model build_model(const ExperimentConfig& cfg, bool with_profile = true);

//! Hash of the canonical configuration echo.
std::string config_fingerprint(const ExperimentConfig& cfg);

}  // namespace superspine
