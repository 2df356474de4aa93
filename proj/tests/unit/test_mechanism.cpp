#include <gtest/gtest.h>

#include <cmath>

#include "superspine/errors.hpp"
#include "superspine/mechanism.hpp"

using namespace superspine;

TEST(Mechanism, QuadraticPsi) {
  auto m = BranchingMechanism::quadratic(2.0, 0.5);
  const Point x = Point::at(0.3);
  EXPECT_DOUBLE_EQ(m.psi(x, 1.5), -0.5 * 1.5 + 2.0 * 2.25);
  EXPECT_DOUBLE_EQ(m.psi_prime(x, 1.5), -0.5 + 2.0 * 2.0 * 1.5);
  EXPECT_TRUE(m.homogeneous());
}

TEST(Mechanism, StablePsiIsPowerLaw) {
  auto m = BranchingMechanism::stable(1.5, 2.0);
  for (double z : {0.1, 1.0, 7.0}) {
    EXPECT_NEAR(m.psi(Point{}, z), 2.0 * std::pow(z, 1.5), 1e-10 * std::pow(z, 1.5));
    EXPECT_NEAR(m.psi_prime(Point{}, z), 3.0 * std::sqrt(z), 1e-10 * std::sqrt(z));
  }
}

TEST(Mechanism, AtomKernelPsi) {
  AtomKernel k{{0.5}, {ScalarField::constant(2.0)}};
  BranchingMechanism m(ScalarField::constant(-0.2), ScalarField::constant(1.0), k, 100.0);
  const double z = 1.3;
  double expected = 0.2 * z + z * z + 2.0 * (std::exp(-0.5 * z) - 1.0 + 0.5 * z);
  EXPECT_NEAR(m.psi(Point{}, z), expected, 1e-14);
  auto local = m.at(Point{});
  EXPECT_NEAR(local.psi(z), expected, 1e-14);
  EXPECT_TRUE(local.has_jumps());
}

TEST(Mechanism, SpatialCoefficientsFreezeAtPoint) {
  BranchingMechanism m(ScalarField::constant(0.0), ScalarField::parse("1 + exp(-|x|^2)"), {}, 100.0);
  EXPECT_FALSE(m.homogeneous());
  EXPECT_DOUBLE_EQ(m.at(Point::at(0.0)).b, 2.0);
  EXPECT_NEAR(m.at(Point::at(1.0)).b, 1.0 + std::exp(-1.0), 1e-15);
}

TEST(Mechanism, PsiConvexAndZeroAtOrigin) {
  auto m = BranchingMechanism::stable(1.3, 1.0, -0.4);
  EXPECT_EQ(m.psi(Point{}, 0.0), 0.0);
  double prev = m.psi_prime(Point{}, 0.0);
  for (double z = 0.25; z < 20.0; z += 0.25) {
    double d = m.psi_prime(Point{}, z);
    EXPECT_GE(d, prev);
    prev = d;
  }
}

TEST(Mechanism, ValidateRejectsNegativeB) {
  BranchingMechanism m(ScalarField::constant(0.0), ScalarField::parse("x1"), {}, 100.0);
  std::vector<Point> pts = {Point::at(-1.0), Point::at(1.0)};
  EXPECT_THROW(m.validate(pts), ConfigError);
}

TEST(Mechanism, GreyConditionDetectsDivergence) {
  EXPECT_TRUE(grey_check([](double z) { return z * z; }).finite);
  EXPECT_FALSE(grey_check([](double z) { return z; }).finite);
}
