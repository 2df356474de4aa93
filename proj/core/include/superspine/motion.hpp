#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "superspine/field.hpp"
#include "superspine/geometry.hpp"
#include "superspine/rng.hpp"

namespace superspine {

enum class MotionKind { brownian, drift_diffusion, killed_box, subordinate_bm };

const char* to_string(MotionKind kind);

/*!
 * Spatial motion of the branching particles.
 *
 * brownian and drift_diffusion have generator (sigma^2/2) Laplacian (+ drift);
 * killed_box is brownian sent to the cemetery when a step ends outside the
 * box. subordinate_bm is B_{S_t} where B has generator Laplacian (variance 2t
 * per coordinate) and S is the stable subordinator with E e^{-l S_t} =
 * e^{-t l^beta}; for beta = 1/2 in d = 1 the marginals are Cauchy of scale t.
 */
class MotionModel {
 public:
  MotionModel() = default;

  static MotionModel brownian(int dim, double sigma);
  static MotionModel drift_diffusion(int dim, double sigma, std::vector<ScalarField> drift);
  static MotionModel killed_box(int dim, double sigma, Box box);
  static MotionModel subordinate_bm(int dim, double subordinator_index);

  MotionKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double sigma() const { return sigma_; }
  const Box& box() const { return box_; }
  const std::vector<ScalarField>& drift() const { return drift_; }
  double subordinator_index() const { return beta_; }
  bool conservative() const { return kind_ != MotionKind::killed_box; }
  //! True when sample_step is exact for any dt (no discretization bias).
  bool exact_steps() const { return kind_ == MotionKind::brownian || kind_ == MotionKind::subordinate_bm; }

  //! One increment of the motion over dt; the cemetery is absorbing.
  Point sample_step(const Point& x, double dt, Rng& rng) const;
  //! Position after time t, using steps no longer than max_step when inexact.
  Point sample_path(const Point& x, double t, double max_step, Rng& rng) const;
  //! Subordinator value at time 1.
  double sample_subordinator(Rng& rng) const;

  std::string describe() const;

 private:
  MotionKind kind_ = MotionKind::brownian;
  int dim_ = 1;
  double sigma_ = 1.0;
  Box box_;
  std::vector<ScalarField> drift_;
  double beta_ = 0.5;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/*!
 * P_t f(x) = E_x f(xi_t). Exact for brownian motion and Gaussian-mixture f;
 * Monte Carlo with n_mc paths otherwise. Rejects fields whose bound is
 * unknown or exceeds bound_limit.
 */
Estimate semigroup_apply(const MotionModel& motion, const ScalarField& f, double t, const Point& x,
                         std::size_t n_mc, Rng& rng, double max_step = 0.01,
                         double bound_limit = 1e12);

}  // namespace superspine
