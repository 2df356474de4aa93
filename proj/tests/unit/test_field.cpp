#include <gtest/gtest.h>

#include <cmath>

#include "superspine/errors.hpp"
#include "superspine/field.hpp"

using namespace superspine;

TEST(ScalarField, ConstantsAndArithmetic) {
  auto f = ScalarField::parse("1 + 2*3 - 4");
  EXPECT_TRUE(f.is_constant());
  EXPECT_DOUBLE_EQ(f(Point::at(5.0)), 3.0);
  EXPECT_DOUBLE_EQ(ScalarField::parse("-(2)")(Point{}), -2.0);
}

TEST(ScalarField, CoordinatesAndGaussian) {
  auto f = ScalarField::parse("x1 + 2*x2");
  EXPECT_FALSE(f.is_constant());
  EXPECT_DOUBLE_EQ(f(Point::at(1.0, 3.0)), 7.0);
  auto g = ScalarField::parse("0.5 + exp(-|x|^2)");
  EXPECT_NEAR(g(Point::at(1.0, 1.0)), 0.5 + std::exp(-2.0), 1e-15);
}

TEST(ScalarField, ClampBoundsRange) {
  auto f = ScalarField::parse("clamp(x1, -1, 2)");
  EXPECT_DOUBLE_EQ(f(Point::at(-7.0)), -1.0);
  EXPECT_DOUBLE_EQ(f(Point::at(9.0)), 2.0);
  ASSERT_TRUE(f.bound().has_value());
  EXPECT_DOUBLE_EQ(*f.bound(), 2.0);
  EXPECT_FALSE(ScalarField::parse("x1").bound().has_value());
}

TEST(ScalarField, CemeteryIsZero) {
  EXPECT_EQ(ScalarField::parse("3")(Point::dead()), 0.0);
}

TEST(ScalarField, GaussianTermsOfMixture) {
  auto terms = ScalarField::parse("1 + 2*exp(-|x|^2)").gaussian_terms();
  ASSERT_TRUE(terms.has_value());
  double at_origin = 0.0;
  for (const auto& t : *terms) at_origin += t.coefficient;
  EXPECT_DOUBLE_EQ(at_origin, 3.0);
}

TEST(ScalarField, ParseErrorsAreConfigErrors) {
  EXPECT_THROW(ScalarField::parse("1 +"), ConfigError);
  EXPECT_THROW(ScalarField::parse("y1"), ConfigError);
  EXPECT_THROW(ScalarField::parse("clamp(x1, 2, 1)"), ConfigError);
}

TEST(ScalarField, FromFunctionKeepsSuppliedRange) {
  auto f = ScalarField::from_function([](const Point& p) { return p.x[0] * p.x[0]; }, Interval{0.0, 4.0}, "sq");
  EXPECT_DOUBLE_EQ(f(Point::at(1.5)), 2.25);
  ASSERT_TRUE(f.bound());
  EXPECT_DOUBLE_EQ(*f.bound(), 4.0);
}
