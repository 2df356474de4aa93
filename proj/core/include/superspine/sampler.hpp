#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "superspine/extinction.hpp"
#include "superspine/measure.hpp"
#include "superspine/mechanism.hpp"
#include "superspine/motion.hpp"
#include "superspine/rng.hpp"
#include "superspine/transition.hpp"

namespace superspine {

struct ParticleControls {
  double kappa = 1.0;              //!< target atom mass; atoms above 2 kappa are halved
  std::size_t max_atoms = 2000000; //!< abort when a measure holds more atoms
};

/*!
 * One step of the particle scheme: every atom moves by the motion, then its
 * mass is replaced by the exact CSBP transition of the mechanism frozen at
 * the new location. The transition's clusters are grouped into atoms of
 * mass about kappa; any atom above 2 kappa is split into equal halves.
 */
class SuperprocessStepper {
 public:
  SuperprocessStepper(const BranchingMechanism& mech, const MotionModel& motion,
                      ParticleControls ctrl);

  void advance(ParticleMeasure& state, double dt, Rng& rng) const;

  const BranchingMechanism& mechanism() const { return mech_; }
  const MotionModel& motion() const { return motion_; }
  const ParticleControls& controls() const { return ctrl_; }

 private:
  BranchingMechanism mech_;
  MotionModel motion_;
  ParticleControls ctrl_;
  bool homogeneous_;
  LocalMechanism local_;
  MassTransition transition_;
};

//! Times 0, dt, 2 dt, ..., steps * dt (each computed as k * dt).
std::vector<double> uniform_times(double dt, std::size_t steps);
//! Number of dt steps in t; throws if t is not a multiple of dt.
std::size_t steps_in(double t, double dt, const char* what);
//! Number of grid times k dt strictly below t (t need not lie on the grid).
std::size_t grid_count_below(double t, double dt);

TrajectoryRecord sample_superprocess(const SuperprocessStepper& stepper, const ParticleMeasure& mu,
                                     std::span<const double> times, Rng& rng);
TrajectoryRecord sample_superprocess(const BranchingMechanism& mech, const MotionModel& motion,
                                     const ParticleMeasure& mu, std::span<const double> times,
                                     const ParticleControls& ctrl, Rng& rng);

struct ConditionedDraw {
  TrajectoryRecord trajectory;
  std::size_t attempts = 0;
};

/*!
 * Rejection sampler for X conditioned on h <= H < h + eps, resolved on the
 * grid as "alive at h and extinct at h + eps". Each attempt runs on its own
 * derived stream; an accepted attempt is replayed with recording.
 */
ConditionedDraw sample_conditioned_direct(const SuperprocessStepper& stepper,
                                          const ParticleMeasure& mu, double h, double eps, double dt,
                                          Rng& rng, std::size_t max_attempts = 100000000);

//! M_t^h = <w_{h-t},X_t> e^{-<v_{h-t},X_t>} / (<w_h,mu> e^{-<v_h,mu>}).
double mweight(const ExtinctionProfile& profile, const ParticleMeasure& mu, double h, double t,
               const ParticleMeasure& xt);

}  // namespace superspine
