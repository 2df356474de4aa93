#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "superspine/field.hpp"
#include "superspine/geometry.hpp"

namespace superspine {

//! Stable Levy kernel n(x,dy) = c(x) a(a-1)/Gamma(2-a) y^{-1-a} dy, a in (1,2).
struct StableKernel {
  double index = 1.5;
  ScalarField strength = ScalarField::constant(1.0);
};

//! Finite-atom Levy kernel: sum_i r_i(x) delta_{y_i}(dy).
struct AtomKernel {
  std::vector<double> sizes;
  std::vector<ScalarField> rates;
};

using LevyKernel = std::variant<std::monostate, StableKernel, AtomKernel>;

//! Normalizing constant a(a-1)/Gamma(2-a) of the stable kernel.
double stable_kernel_constant(double index);

//! Mechanism coefficients frozen at one location; a homogeneous mechanism.
struct LocalMechanism {
  double alpha = 0.0;
  double b = 0.0;
  double stable_c = 0.0;  //!< 0 means no stable part
  double stable_index = 1.5;
  std::vector<std::pair<double, double>> atoms;  //!< (size y_i, rate r_i)

  double psi(double z) const;
  double psi_prime(double z) const;
  //! Integral of (y ^ y^2) against the Levy kernel.
  double kernel_moment() const;
  bool has_jumps() const { return stable_c > 0.0 || !atoms.empty(); }
};

/*!
 * Branching mechanism
 *
 *   psi(x,z) = -alpha(x) z + b(x) z^2 + int (e^{-zy} - 1 + zy) n(x,dy)
 *
 * with a stable or finite-atom Levy kernel. Evaluation is pure and
 * thread-safe.
 */
class BranchingMechanism {
 public:
  BranchingMechanism() = default;
  BranchingMechanism(ScalarField alpha, ScalarField b, LevyKernel levy, double bound_K);

  static BranchingMechanism quadratic(double b, double alpha = 0.0);
  static BranchingMechanism stable(double index, double c, double alpha = 0.0);

  double psi(const Point& x, double z) const;
  double psi_prime(const Point& x, double z) const;

  LocalMechanism at(const Point& x) const;

  bool homogeneous() const;
  const ScalarField& alpha() const { return alpha_; }
  const ScalarField& b() const { return b_; }
  const LevyKernel& levy() const { return levy_; }
  double bound_K() const { return K_; }

  //! Throws ConfigError if a structural invariant fails at any given point.
  void validate(std::span<const Point> points) const;

  //! Canonical description used for profile fingerprints.
  std::string describe() const;

 private:
  ScalarField alpha_ = ScalarField::constant(0.0);
  ScalarField b_ = ScalarField::constant(0.0);
  LevyKernel levy_;
  double K_ = 0.0;
};

struct GreyResult {
  bool finite = false;
  double integral_estimate = 0.0;
};

/*!
 * Estimate int_Z^inf dz / psi(z) for a homogeneous mechanism.
 *
 * The cutoff doubles until a segment contributes < 1e-10. Divergence is
 * declared when segment contributions stop decaying over 8 doublings; this
 * is a heuristic, not a proof.
 */
GreyResult grey_check(const std::function<double(double)>& psi, double lower = 1.0);

}  // namespace superspine
