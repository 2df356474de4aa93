#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "superspine/motion.hpp"
#include "superspine/rng.hpp"

using namespace superspine;

namespace {

// One-sample KS distance against a CDF.
double ks_distance(std::vector<double> xs, double (*cdf)(double)) {
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size()), d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double cauchy_unit(double x) { return 0.5 + std::atan(x) / M_PI; }
double cauchy_half(double x) { return 0.5 + std::atan(2.0 * x) / M_PI; }

}  // namespace

TEST(Motion, BrownianStepMoments) {
  auto m = MotionModel::brownian(2, 1.5);
  Rng rng(11);
  const int n = 40000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    auto p = m.sample_step(Point::at(1.0, -1.0), 0.2, rng);
    s1 += p.x[1];
    s2 += (p.x[0] - 1.0) * (p.x[0] - 1.0);
  }
  EXPECT_NEAR(s1 / n, -1.0, 4 * std::sqrt(1.5 * 1.5 * 0.2 / n));
  EXPECT_NEAR(s2 / n, 1.5 * 1.5 * 0.2, 0.02);
}

TEST(Motion, DriftShiftsMean) {
  auto m = MotionModel::drift_diffusion(1, 0.5, {ScalarField::constant(2.0)});
  Rng rng(3);
  double s = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += m.sample_path(Point::at(0.0), 0.5, 0.01, rng).x[0];
  EXPECT_NEAR(s / n, 1.0, 4 * 0.5 * std::sqrt(0.5 / n));
}

TEST(Motion, KilledBoxSendsToCemetery) {
  Box box;
  box.dim = 1;
  box.lo = {-0.1, 0, 0};
  box.hi = {0.1, 0, 0};
  auto m = MotionModel::killed_box(1, 1.0, box);
  Rng rng(5);
  int dead = 0;
  for (int i = 0; i < 1000; ++i) {
    auto p = m.sample_path(Point::at(0.0), 1.0, 0.01, rng);
    dead += p.cemetery;
    EXPECT_TRUE(p.cemetery || box.contains(p));
  }
  EXPECT_GT(dead, 990);
  EXPECT_FALSE(m.conservative());
  EXPECT_TRUE(m.sample_step(Point::dead(), 0.1, rng).cemetery);
}

// The 1/2-subordinate of the Laplacian motion is the Cauchy process: scale t in d = 1.
TEST(Motion, HalfSubordinateIsCauchy) {
  auto m = MotionModel::subordinate_bm(1, 0.5);
  Rng rng(21);
  const int n = 20000;
  std::vector<double> one, half;
  for (int i = 0; i < n; ++i) {
    one.push_back(m.sample_step(Point{}, 1.0, rng).x[0]);
    half.push_back(m.sample_step(Point{}, 0.5, rng).x[0]);
  }
  // KS critical value at level 0.001 is about 1.95 / sqrt(n).
  EXPECT_LT(ks_distance(one, cauchy_unit), 1.95 / std::sqrt(n));
  EXPECT_LT(ks_distance(half, cauchy_half), 1.95 / std::sqrt(n));
}

TEST(Motion, SubordinatorLaplaceTransform) {
  auto m = MotionModel::subordinate_bm(1, 0.5);
  Rng rng(8);
  const int n = 40000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::exp(-m.sample_subordinator(rng));
  EXPECT_NEAR(acc / n, std::exp(-1.0), 0.01);
}

TEST(Motion, SemigroupExactForGaussianField) {
  auto m = MotionModel::brownian(1, 1.0);
  Rng rng(1);
  auto est = semigroup_apply(m, ScalarField::parse("exp(-|x|^2)"), 0.5, Point::at(0.5), 1, rng);
  double oracle = std::exp(-0.25 / 2.0) / std::sqrt(2.0);
  EXPECT_NEAR(est.value, oracle, 1e-12);
}
