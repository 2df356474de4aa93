#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "superspine/experiment.hpp"
#include "superspine/field.hpp"
#include "superspine/measure.hpp"
#include "superspine/williams.hpp"

namespace superspine {

struct VerificationReport {
  std::string test_id;
  std::string model_fingerprint;
  std::string metric;          //!< what `statistic` measures
  double statistic = 0.0;
  double threshold = 0.0;
  double p_value = -1.0;       //!< -1 when not a hypothesis test
  double relative_error = -1.0;
  std::map<std::string, std::size_t> mc_sizes;
  bool pass = false;
  bool infeasible = false;
  nlohmann::json details = nlohmann::json::object();
  nlohmann::json sensitivity = nlohmann::json::array();
};

nlohmann::json to_json(const VerificationReport& r);

struct VerifyOptions {
  unsigned workers = 0;  //!< 0: hardware concurrency; results do not depend on it
};

//! Numerical vs closed-form v and w, and w against a finite difference of v.
VerificationReport verify_closed_form(const Model& model);
//! Particle scheme total mass at t = h vs the exact CSBP transition.
VerificationReport verify_csbp(const Model& model, std::uint64_t seed, const VerifyOptions& opt);
//! Mean of M_{h/2}^h under P_mu, and of Y_{h/2}^h under Pi_x.
VerificationReport verify_martingale(const Model& model, std::uint64_t seed, const VerifyOptions& opt);
//! Williams sampler vs the conditioned-direct sampler.
VerificationReport verify_williams_law(const Model& model, std::uint64_t seed, const VerifyOptions& opt);
//! F_H-mixture of Williams samples vs the unconditioned process.
VerificationReport verify_mixture(const Model& model, std::uint64_t seed, const VerifyOptions& opt);
//! Two estimators of E[<f,X_t> e^{-<g,X_t>}] with f = g = 1.
VerificationReport laplace_cross_check(const Model& model, std::uint64_t seed, const VerifyOptions& opt);
//! Flow identity u_{v_t}(s) = v(t+s) and the Feynman-Kac representation of w.
VerificationReport verify_flow(const Model& model, std::uint64_t seed, const VerifyOptions& opt);
//! Dispersion trend before extinction and, for homogeneous models, the law of Z.
VerificationReport verify_concentration(const Model& model, std::uint64_t seed, const VerifyOptions& opt);

//! Run one named test.
VerificationReport run_test(const std::string& id, const Model& model, std::uint64_t seed,
                            const VerifyOptions& opt);

/*!
 * J_s(h,x) = -log E_{s,delta_x}[exp(-sum_j <f_j, X_{t_j}> - <v(h - t_n), X_{t_n}>)],
 * the observations restricted to t_j > s. Computed backwards: starting from
 * v(h - t_n) + f_n, the mild equation is marched between observation times
 * and each f_j is added on crossing t_j.
 */
double compute_J(const Model& model, double s, double h,
                 const std::vector<std::pair<double, ScalarField>>& observations, const Point& x);

struct NearExtinction {
  std::vector<double> times;
  std::vector<double> dispersion;  //!< mass-weighted spatial standard deviation
  Point z;                         //!< mass-weighted mean at the last surviving time
  bool valid = false;
};

NearExtinction near_extinction_statistic(const TrajectoryRecord& traj, int dim);
NearExtinction near_extinction_statistic(const WilliamsSample& sample, int dim);

//! Total mass of the stored measure at time t (0 at or beyond extinction).
double mass_at_time(const TrajectoryRecord& traj, double t);

}  // namespace superspine
