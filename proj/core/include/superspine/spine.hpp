#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "superspine/extinction.hpp"
#include "superspine/measure.hpp"
#include "superspine/mechanism.hpp"
#include "superspine/motion.hpp"
#include "superspine/rng.hpp"

namespace superspine {

//! A spine path on the grid times below h with its log-weight record.
struct SpinePath {
  std::vector<double> times;
  std::vector<Point> locations;
  std::vector<double> log_increments;    //!< size = times.size() - 1
  std::vector<double> cumulative_log_y;  //!< starts at 0
  std::size_t resamples = 0;
  double min_ess_fraction = 1.0;         //!< smallest ESS / n seen before resampling
};

//! nu(dx) = w(h,x) mu(dx) / <w_h, mu>.
ParticleMeasure spine_initial_measure(const ExtinctionProfile& profile, const ParticleMeasure& mu,
                                      double h);

/*!
 * log of the one-step factor of Y^h between (t0, x0) and (t1, x1): the ratio
 * of w(h - t, x) values times the trapezoid exponential of
 * -psi'(x, v(h - t, x)).
 */
double log_y_increment(const ExtinctionProfile& profile, const BranchingMechanism& mech, double h,
                       double t0, const Point& x0, double t1, const Point& x1);

//! Y_t^h at the last time of the path; exactly 1 for homogeneous profiles.
double spine_weight_Y(const ExtinctionProfile& profile, const BranchingMechanism& mech,
                      std::span<const double> times, std::span<const Point> locations, double h);

/*!
 * Draw a spine path under Pi_nu^h. Homogeneous profiles give an unweighted
 * motion path. Otherwise n_particles paths are advanced with Y-increment
 * weights and systematically resampled when ESS < n/2; one path is drawn
 * by the final weights.
 */
SpinePath sample_spine(const ExtinctionProfile& profile, const BranchingMechanism& mech,
                       const MotionModel& motion, const ParticleMeasure& nu, double h, double dt,
                       std::size_t n_particles, Rng& rng);

}  // namespace superspine
