#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "superspine/extinction.hpp"
#include "superspine/rng.hpp"

using namespace superspine;

namespace {

// t = int_v^inf dz / psi(z), evaluated with z = v / s on a fine midpoint rule.
double inverse_time(const LocalMechanism& m, double v) {
  const int n = 200000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) / n;
    double z = v / s;
    total += v / (s * s * m.psi(z)) / n;
  }
  return total;
}

LocalMechanism quadratic(double b, double alpha = 0.0) {
  LocalMechanism m;
  m.b = b;
  m.alpha = alpha;
  return m;
}

LocalMechanism stable(double index, double c) {
  LocalMechanism m;
  m.stable_c = c;
  m.stable_index = index;
  return m;
}

}  // namespace

TEST(Extinction, FellerClosedForm) {
  auto m = quadratic(1.0);
  EXPECT_NEAR(solve_v_homogeneous(m, 1.0), 1.0, 1e-8);
  EXPECT_NEAR(solve_w_homogeneous(m, 1.0), 1.0, 1e-8);
  for (double t : {0.01, 0.3, 2.0, 9.0}) EXPECT_NEAR(homogeneous_v(m, t) * t, 1.0, 1e-12);
}

TEST(Extinction, SubcriticalQuadratic) {
  auto m = quadratic(2.0, -0.5);
  for (double t : {0.1, 1.0, 3.0}) {
    double oracle = 0.5 / (2.0 * (std::exp(0.5 * t) - 1.0));
    EXPECT_NEAR(homogeneous_v(m, t), oracle, 1e-12 * oracle);
    EXPECT_NEAR(solve_v_homogeneous(m, t), oracle, 1e-8 * oracle);
  }
}

TEST(Extinction, StableClosedForm) {
  auto m = stable(1.5, 1.0);
  EXPECT_NEAR(solve_v_homogeneous(m, 1.0), 4.0, 1e-6);
  EXPECT_NEAR(solve_w_homogeneous(m, 1.0), 8.0, 1e-6);
  EXPECT_NEAR(homogeneous_v(stable(1.5, 2.0), 1.0), 1.0, 1e-12);
}

TEST(Extinction, NumericalInverseMatchesQuadratureForAtoms) {
  LocalMechanism m = quadratic(0.5, -0.2);
  m.atoms = {{0.5, 1.0}};
  for (double t : {0.2, 1.0}) {
    double v = solve_v_homogeneous(m, t);
    EXPECT_NEAR(inverse_time(m, v), t, 1e-5 * t);
  }
}

TEST(Extinction, VDecreasesWInPositive) {
  auto m = stable(1.3, 1.0);
  double prev = INFINITY;
  for (double t = 0.05; t < 3.0; t += 0.05) {
    double v = solve_v_homogeneous(m, t);
    EXPECT_LT(v, prev);
    EXPECT_GT(solve_w_homogeneous(m, t), 0.0);
    prev = v;
  }
}

TEST(Extinction, ReactionFlowQuadratic) {
  auto m = quadratic(1.5);
  for (double z0 : {0.1, 2.0, 50.0}) {
    EXPECT_NEAR(reaction_flow(m, z0, 0.3), 1.0 / (1.0 / z0 + 1.5 * 0.3), 1e-12);
  }
}

TEST(Extinction, ReactionFlowComposes) {
  LocalMechanism m = quadratic(0.5, 0.3);
  m.atoms = {{1.0, 0.7}};
  double once = reaction_flow(m, 3.0, 0.4);
  double twice = reaction_flow(m, reaction_flow(m, 3.0, 0.15), 0.25);
  EXPECT_NEAR(once, twice, 1e-8 * once);
}

TEST(Extinction, CdfOfMeasure) {
  auto profile = ExtinctionProfile::homogeneous(BranchingMechanism::quadratic(1.0));
  ParticleMeasure mu;
  mu.add(Point::at(0.0), 1.5);
  mu.add(Point::at(2.0), 0.5);
  EXPECT_NEAR(extinction_cdf(profile, mu, 0.5), std::exp(-4.0), 1e-14);
}

TEST(Extinction, SampledExtinctionTimeFollowsCdf) {
  auto profile = ExtinctionProfile::homogeneous(BranchingMechanism::quadratic(1.0));
  auto mu = ParticleMeasure::dirac(Point{}, 1.0);
  Rng rng(7);
  const int n = 20000;
  int below_half = 0, below_two = 0;
  for (int i = 0; i < n; ++i) {
    auto d = sample_extinction_time(profile, mu, rng);
    EXPECT_NEAR(d.u, std::exp(-1.0 / d.h), 1e-9);
    below_half += d.h <= 0.5;
    below_two += d.h <= 2.0;
  }
  for (auto [count, p] : {std::pair{below_half, std::exp(-2.0)}, std::pair{below_two, std::exp(-0.5)}}) {
    double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(count) / n, p, 4 * se);
  }
}

TEST(Extinction, ProfileRoundTrip) {
  auto profile = ExtinctionProfile::homogeneous(BranchingMechanism::stable(1.5, 1.0));
  std::stringstream ss;
  profile.write(ss);
  auto back = ExtinctionProfile::read(ss);
  EXPECT_DOUBLE_EQ(back.v(1.0, Point{}), profile.v(1.0, Point{}));
  std::stringstream again;
  back.write(again);
  std::stringstream first;
  profile.write(first);
  EXPECT_EQ(first.str(), again.str());
}
