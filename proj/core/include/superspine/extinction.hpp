#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "superspine/geometry.hpp"
#include "superspine/grid.hpp"
#include "superspine/measure.hpp"
#include "superspine/mechanism.hpp"
#include "superspine/rng.hpp"

namespace superspine {

/*!
 * v(t) for a homogeneous mechanism, found by inverting
 * int_{v}^{inf} dz / psi(z) = t with a safeguarded Newton-bisection
 * iteration on adaptive quadrature. Returns +inf when the Grey condition
 * fails (the mass never dies out in finite time).
 */
double solve_v_homogeneous(const LocalMechanism& mech, double t);
double solve_v_homogeneous(const BranchingMechanism& mech, double t);
//! w(t) = psi(v(t)).
double solve_w_homogeneous(const LocalMechanism& mech, double t);
double solve_w_homogeneous(const BranchingMechanism& mech, double t);

//! True when v(t) has a closed form (linear plus one of quadratic or stable).
bool has_closed_form(const LocalMechanism& mech);
//! v(t) by closed form when available, otherwise by solve_v_homogeneous.
double homogeneous_v(const LocalMechanism& mech, double t);

/*!
 * Solution at time tau of z' = -psi(z), z(0) = z0, for a frozen-x
 * mechanism: closed forms for linear plus quadratic or stable parts,
 * otherwise exact inversion of int_z^{z0} d zeta / psi(zeta) = tau, falling
 * back to RK4 where psi is not positive.
 */
double reaction_flow(const LocalMechanism& mech, double z0, double tau);

struct ProfileDiagnostics {
  double max_w_discrepancy = 0.0;   //!< max relative gap between the two w estimates
  std::size_t tie_break_points = 0; //!< table entries where the marched w was used
  double bootstrap_time = 0.0;
  std::size_t substeps = 0;
  std::size_t step_halvings = 0;
};

/*!
 * Extinction functionals v(t,x) = -log P_{delta_x}(X_t = 0) and
 * w = -dv/dt, either in closed form (homogeneous mechanisms) or tabulated
 * on a time x space grid. Grid tables are interpolated log-log in t and
 * multilinearly in x. Immutable once built.
 */
class ExtinctionProfile {
 public:
  enum class Mode { closed_form, grid };

  ExtinctionProfile() = default;

  //! Closed-form profile; the mechanism must be homogeneous.
  static ExtinctionProfile homogeneous(const BranchingMechanism& mech,
                                       std::vector<double> report_times = {});
  static ExtinctionProfile tabulated(SpatialGrid grid, std::vector<double> times,
                                     std::vector<double> v, std::vector<double> w,
                                     std::optional<Box> support, std::string mechanism_fp,
                                     std::string motion_fp);

  Mode mode() const { return mode_; }
  bool homogeneous() const { return mode_ == Mode::closed_form; }
  double v(double t, const Point& x) const;
  double w(double t, const Point& x) const;
  //! Smallest / largest admissible time (0 / inf in closed-form mode).
  double t_min() const;
  double t_max() const;

  const LocalMechanism& local() const { return local_; }
  const SpatialGrid& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& v_table() const { return v_; }
  const std::vector<double>& w_table() const { return w_; }
  const std::string& mechanism_fingerprint() const { return mechanism_fp_; }
  const std::string& motion_fingerprint() const { return motion_fp_; }
  const std::optional<Box>& support() const { return support_; }

  ProfileDiagnostics diagnostics;

  //! Versioned flat text: header, time grid, space grid, v table, w table.
  void write(std::ostream& os) const;
  static ExtinctionProfile read(std::istream& is);

 private:
  double lookup(const std::vector<double>& table, double t, const Point& x) const;

  Mode mode_ = Mode::closed_form;
  LocalMechanism local_;
  bool closed_ = false;
  SpatialGrid grid_;
  std::vector<double> times_;
  std::vector<double> v_;
  std::vector<double> w_;
  std::optional<Box> support_;
  std::string mechanism_fp_;
  std::string motion_fp_;
};

//! F_H(t) = exp(-<v_t, mu>).
double extinction_cdf(const ExtinctionProfile& profile, const ParticleMeasure& mu, double t);

struct ExtinctionDraw {
  double h = 0.0;
  double u = 0.0;  //!< F_H(h)
};

//! Inverse-CDF draw of the extinction time H under P_mu.
ExtinctionDraw sample_extinction_time(const ExtinctionProfile& profile, const ParticleMeasure& mu,
                                      Rng& rng);

}  // namespace superspine
