#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "superspine/extinction.hpp"
#include "superspine/measure.hpp"
#include "superspine/rng.hpp"
#include "superspine/sampler.hpp"
#include "superspine/spine.hpp"

namespace superspine {

enum class ImmigrationKind { continuous, jump, initial };
const char* to_string(ImmigrationKind kind);

/*!
 * One immigrant cluster. The clone record runs on clone age (its own time
 * 0 is the birth time); grid_index maps each stored age to the index of the
 * main grid time it lands on, or npos for off-grid ages (birth and delta).
 */
struct ImmigrationEvent {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ImmigrationKind kind = ImmigrationKind::continuous;
  double birth = 0.0;
  Point source;
  double mass = 0.0;  //!< y for jump events, eps_N for continuous events
  TrajectoryRecord clone;
  std::vector<std::size_t> grid_index;
  std::size_t attempts = 0;
  //! Clone age at extinction, or kNeverExtinct if alive at the horizon.
  double clone_extinction_time() const { return clone.extinction_time; }
};

struct WilliamsControls {
  double dt = 0.01;                 //!< main time grid step
  double delta = 0.05;              //!< clones must live at least this long
  double eps_factor = 0.05;         //!< eps_N = eps_factor / v(delta, x) unless eps_n is set
  std::optional<double> eps_n;
  std::size_t spine_particles = 256;
  std::size_t max_rejections = 10000000;
  //! Absolute time up to which paths are simulated; the conditioning on
  //! events after it is imposed by its exact survival probability.
  double horizon = std::numeric_limits<double>::infinity();
  ParticleControls particles;
};

struct WilliamsSample {
  double h = 0.0;
  double delta = 0.0;
  SpinePath spine;
  std::vector<ImmigrationEvent> events;
  TrajectoryRecord initial;
  std::size_t initial_attempts = 0;
  //! Lambda^h on the kept grid times. Mass may vanish and
  //! reappear inside delta-gaps of the immigration, so the zero trap is not
  //! enforced; extinction_time is the time after which it stays empty.
  TrajectoryRecord assembled;
};

/*!
 * Number of main-grid times kept: every grid time below h, or up to the
 * horizon (which must lie on the grid) when it comes first. Paths are
 * simulated to the last of these; conditioning on what happens between it
 * and h is imposed by the exact extinction probability.
 */
std::size_t williams_grid_size(double h, const WilliamsControls& ctrl);

//! 2 b(x) (v(delta,x) - v(h-s,x)) for s < h - delta, else 0.
double continuous_rate(const ExtinctionProfile& profile, const BranchingMechanism& mech, double h,
                       double s, const Point& x, double delta);
//! int y (e^{-y v(h-s,x)} - e^{-y v(delta,x)}) n(x,dy) for s < h - delta, else 0.
double jump_rate(const ExtinctionProfile& profile, const BranchingMechanism& mech, double h, double s,
                 const Point& x, double delta);
//! Draw y from the density proportional to y (e^{-yA} - e^{-yB}) n(dy), A < B.
double sample_jump_mass(const LocalMechanism& local, double A, double B, Rng& rng);

/*!
 * Run one clone from mass * delta_x born at s to the last kept grid time and
 * keep it with the conditional probability of delta <= H < h - s given its
 * state at the end. Returns false on rejection.
 */
bool propose_clone(const SuperprocessStepper& stepper, const ExtinctionProfile& profile,
                   const Point& x, double mass, double s, double h, const WilliamsControls& ctrl,
                   Rng& rng, ImmigrationEvent& out);

std::vector<ImmigrationEvent> sample_continuous_immigration(
    const SpinePath& spine, const ExtinctionProfile& profile, const SuperprocessStepper& stepper,
    double h, const WilliamsControls& ctrl, Rng& rng);

std::vector<ImmigrationEvent> sample_jump_immigration(
    const SpinePath& spine, const ExtinctionProfile& profile, const SuperprocessStepper& stepper,
    double h, const WilliamsControls& ctrl, Rng& rng);

//! X under P_mu(. | H < h) on the kept grid times, by rejection.
ConditionedDraw sample_initial_immigration(const SuperprocessStepper& stepper,
                                           const ExtinctionProfile& profile,
                                           const ParticleMeasure& mu, double h,
                                           const WilliamsControls& ctrl, Rng& rng);

/*!
 * Spine, initial cluster, continuous and jump immigration, each on its own
 * stream derived from one draw of rng, assembled by atom union.
 */
WilliamsSample sample_williams(const SuperprocessStepper& stepper, const ExtinctionProfile& profile,
                               const ParticleMeasure& mu, double h, const WilliamsControls& ctrl,
                               Rng& rng);

/*!
 * Atom union of the initial cluster and every clone on the first
 * grid_size main grid times. If mass survives to the last time and that
 * time is the last one below h, extinction_time is h.
 */
TrajectoryRecord assemble(const TrajectoryRecord& initial, const std::vector<ImmigrationEvent>& events,
                          double dt, std::size_t grid_size, double h);

}  // namespace superspine
