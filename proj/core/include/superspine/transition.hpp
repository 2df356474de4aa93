#pragma once

#include <vector>

#include "superspine/mechanism.hpp"
#include "superspine/rng.hpp"

namespace superspine {

/*!
 * Exact transition of the critical quadratic CSBP psi(z) = b z^2:
 * N ~ Poisson(m/(bt)) clusters, each exponential with mean bt.
 */
double sample_csbp_exact(double b, double m, double t, Rng& rng);

/*!
 * Unit cluster of the stable CSBP, with Laplace transform
 * 1 - mu (1 + mu^beta)^{-1/beta}, beta = a - 1.
 *
 * Y = S' E^{1/beta}, where E ~ Exp(1) and S' = (A(U)/G)^{(1-beta)/beta}
 * with G ~ Gamma(1/beta) and U on (0, pi) with density proportional to
 * A(u)^{-(1-beta)/beta} (A is Zolotarev's function from Kanter's
 * representation of the positive stable law).
 */
double sample_stable_cluster(double beta, Rng& rng);

/*!
 * Exact mass transitions of the homogeneous CSBP with a frozen-x mechanism,
 * returned as independent clusters. Clusters are merged in order into
 * groups of about `group_mass` (grouping co-located independent clusters
 * does not change the law of the measure).
 *
 * The linear, quadratic, stable and atom parts are composed by Lie
 * splitting when more than one jump mechanism is present; each part is
 * exact on its own.
 */
class MassTransition {
 public:
  explicit MassTransition(double group_mass) : group_mass_(group_mass) {}

  void apply(const LocalMechanism& m, double mass, double dt, Rng& rng,
             std::vector<double>& pieces) const;

  //! Linear + quadratic part with drift coefficient beta = -alpha.
  void quadratic(double beta, double b, double mass, double dt, Rng& rng,
                 std::vector<double>& out) const;
  //! Linear + stable part.
  void stable(double beta, double c, double index, double mass, double dt, Rng& rng,
              std::vector<double>& out) const;
  //! Pure-jump part sum_i r_i (e^{-z y_i} - 1): Gillespie simulation.
  static double atoms(const std::vector<std::pair<double, double>>& atoms, double mass, double dt,
                      Rng& rng);

 private:
  double group_mass_;
};

}  // namespace superspine
