#pragma once

#include <array>
#include <vector>

#include "superspine/extinction.hpp"
#include "superspine/field.hpp"
#include "superspine/grid.hpp"
#include "superspine/mechanism.hpp"
#include "superspine/motion.hpp"

namespace superspine {

using GridField = std::vector<double>;

struct SolverControls {
  double dt = 0.0025;             //!< largest Strang substep
  double bootstrap_time = 1e-4;   //!< start of the march for v (capped at t_1 / 4)
  double growth = 0.05;           //!< step growth factor while leaving the singular layer
  int hermite_order = 0;          //!< Gauss-Hermite nodes per axis (0: by dimension)
  int subordinator_nodes = 64;    //!< quantile nodes of the subordinator
  double monotone_tolerance = 1e-9;
  int max_halvings = 10;
};

/*!
 * Strang splitting for u_t = L u - psi(x, u) on a spatial grid.
 *
 * The motion step applies the transition kernel of the motion to the grid
 * function by deterministic quadrature (Gauss-Hermite for Gaussian steps,
 * quantile nodes for the subordinator), reading off-grid values with the
 * limited cubic interpolant and clamping outside the grid box. The
 * reaction step is the exact frozen-x flow of z' = -psi(x, z).
 *
 * An optional tangent field is carried through the linearized steps; for
 * u = v it is the Feynman-Kac representation of w = -dv/dt.
 */
class MildSolver {
 public:
  MildSolver(const BranchingMechanism& mech, const MotionModel& motion, const SpatialGrid& grid,
             SolverControls controls);

  //! One step R(tau/2) D(tau) R(tau/2); false (and inputs untouched) on failure.
  bool step(GridField& u, double tau, GridField* tangent = nullptr) const;
  //! March by `duration` in substeps of at most controls.dt, halving on failure.
  void advance(GridField& u, double duration, GridField* tangent = nullptr) const;

  void diffuse(GridField& u, double tau) const;
  void react(GridField& u, double tau, GridField* tangent) const;

  const SpatialGrid& grid() const { return grid_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<LocalMechanism>& locals() const { return locals_; }
  //! True for grid points outside the motion's state space (killed box).
  bool outside(std::size_t i) const { return outside_[i] != 0; }
  std::size_t halvings() const { return halvings_; }

 private:
  struct UnitNode {
    std::array<double, kMaxDim> z{};
    double s = 0.0;  // subordinator quantile (subordinate motion only)
    double weight = 0.0;
  };

  MotionModel motion_;
  SpatialGrid grid_;
  SolverControls controls_;
  std::vector<Point> points_;
  std::vector<LocalMechanism> locals_;
  std::vector<std::array<double, kMaxDim>> drift_;
  std::vector<char> outside_;
  std::vector<UnitNode> nodes_;
  mutable std::size_t halvings_ = 0;
};

//! Laplace functional solution u_f(t, .) on the grid.
GridField solve_u_f(const BranchingMechanism& mech, const MotionModel& motion, const ScalarField& f,
                    double t, const SpatialGrid& grid, const SolverControls& controls);

/*!
 * Tabulate v and w on `times` x `grid`. The march starts at a tiny time
 * from the frozen-x homogeneous solution capped by the dominating
 * mechanism's v, leaves the singular layer with geometrically growing
 * steps, then proceeds in uniform substeps. w is the centered difference
 * of v in t, replaced by the marched Feynman-Kac tangent where the two
 * disagree by more than 5%.
 */
ExtinctionProfile solve_vw_spatial(const BranchingMechanism& mech, const MotionModel& motion,
                                   const SpatialGrid& grid, const std::vector<double>& times,
                                   const LocalMechanism& dominating, const SolverControls& controls);

}  // namespace superspine
