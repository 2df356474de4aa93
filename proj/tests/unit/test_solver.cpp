#include <gtest/gtest.h>

#include <cmath>

#include "superspine/solver.hpp"

using namespace superspine;

namespace {

SpatialGrid line(double lo, double hi, int n) { return SpatialGrid(1, {lo, 0, 0}, {hi, 0, 0}, {n, 1, 1}); }

std::vector<double> times_from(double t1, double t_max, double dt) {
  std::vector<double> t;
  for (int k = 0; t1 + k * dt <= t_max + 1e-12; ++k) t.push_back(t1 + k * dt);
  return t;
}

}  // namespace

// A constant mechanism run through the spatial solver must reproduce v(t) = 1/(b t).
TEST(Solver, ConstantMechanismMatchesClosedForm) {
  auto mech = BranchingMechanism::quadratic(1.0);
  auto motion = MotionModel::brownian(1, 1.0);
  auto grid = line(-3.0, 3.0, 31);
  LocalMechanism dom;
  dom.b = 1.0;
  SolverControls ctrl;
  auto profile = solve_vw_spatial(mech, motion, grid, times_from(0.01, 1.0, 0.01), dom, ctrl);
  for (double t : {0.05, 0.5, 1.0}) {
    for (double x : {-2.0, 0.0, 1.3}) {
      EXPECT_NEAR(profile.v(t, Point::at(x)) * t, 1.0, 1e-3) << "t=" << t << " x=" << x;
      EXPECT_NEAR(profile.w(t, Point::at(x)) * t * t, 1.0, 1e-2) << "t=" << t << " x=" << x;
    }
  }
}

TEST(Solver, ConstantInitialDataStaysFlat) {
  auto mech = BranchingMechanism::quadratic(2.0);
  auto grid = line(-2.0, 2.0, 21);
  auto u = solve_u_f(mech, MotionModel::brownian(1, 1.0), ScalarField::constant(1.0), 0.5, grid, {});
  for (double x : u) EXPECT_NEAR(x, 1.0 / (1.0 + 2.0 * 0.5), 1e-9);
}

// Pure heat flow: u(t) for f = exp(-x^2) is the Gaussian convolution.
TEST(Solver, DiffusionMatchesHeatKernel) {
  BranchingMechanism none(ScalarField::constant(0.0), ScalarField::constant(0.0), {}, 1.0);
  auto grid = line(-8.0, 8.0, 161);
  const double t = 0.5;
  auto u = solve_u_f(none, MotionModel::brownian(1, 1.0), ScalarField::parse("exp(-|x|^2)"), t, grid, {});
  auto pts = grid.points();
  for (std::size_t i = 60; i <= 100; i += 10) {
    double x = pts[i].x[0];
    double oracle = std::exp(-x * x / (1.0 + 2.0 * t)) / std::sqrt(1.0 + 2.0 * t);
    EXPECT_NEAR(u[i], oracle, 2e-3) << x;
  }
}

// Larger b near the origin gives faster extinction there.
TEST(Solver, SpatialProfileOrdersByBranchingRate) {
  BranchingMechanism mech(ScalarField::constant(0.0), ScalarField::parse("1 + exp(-|x|^2)"), {}, 100.0);
  auto grid = line(-5.0, 5.0, 51);
  LocalMechanism dom;
  dom.b = 1.0;
  auto profile = solve_vw_spatial(mech, MotionModel::brownian(1, 1.0), grid, times_from(0.01, 1.0, 0.01), dom, {});
  double center = profile.v(1.0, Point::at(0.0)), far = profile.v(1.0, Point::at(4.0));
  EXPECT_LT(center, far);
  EXPECT_GT(center, 0.5 - 1e-3);  // bounded by the b = 2 profile
  EXPECT_LT(far, 1.0 + 1e-3);     // and by the b = 1 profile
}
