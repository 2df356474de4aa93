#include <gtest/gtest.h>

#include <cmath>

#include "superspine/extinction.hpp"
#include "superspine/williams.hpp"

using namespace superspine;

namespace {

WilliamsControls controls(double dt, double delta) {
  WilliamsControls c;
  c.dt = dt;
  c.delta = delta;
  c.eps_factor = 0.05;
  return c;
}

}  // namespace

TEST(Williams, ContinuousRateFormula) {
  auto mech = BranchingMechanism::quadratic(1.5);
  auto profile = ExtinctionProfile::homogeneous(mech);
  // v(t) = 1/(1.5 t).
  double expect = 2 * 1.5 * (1 / (1.5 * 0.1) - 1 / (1.5 * 0.7));
  EXPECT_NEAR(continuous_rate(profile, mech, 1.0, 0.3, Point{}, 0.1), expect, 1e-10);
  EXPECT_EQ(continuous_rate(profile, mech, 1.0, 0.95, Point{}, 0.1), 0.0);
  EXPECT_EQ(jump_rate(profile, mech, 1.0, 0.3, Point{}, 0.1), 0.0);
}

TEST(Williams, AtomJumpRateAndMass) {
  BranchingMechanism mech(ScalarField::constant(0.0), ScalarField::constant(1.0),
                          AtomKernel{{0.5}, {ScalarField::constant(2.0)}}, 10.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  double A = profile.v(0.7, Point{}), B = profile.v(0.1, Point{});
  double expect = 2.0 * 0.5 * (std::exp(-0.5 * A) - std::exp(-0.5 * B));
  EXPECT_NEAR(jump_rate(profile, mech, 1.0, 0.3, Point{}, 0.1), expect, 1e-10);
  Rng rng(1);
  EXPECT_EQ(sample_jump_mass(mech.at(Point{}), A, B, rng), 0.5);
}

// Stable jump masses: density proportional to y^{-a} (e^{-yA} - e^{-yB}); check the mean.
TEST(Williams, StableJumpMassMean) {
  LocalMechanism local;
  local.stable_c = 1.0;
  local.stable_index = 1.5;
  const double A = 1.0, B = 4.0;
  // E y = int y^{1-a}(..)/int y^{-a}(..) = Gamma(2-a)(A^{a-2}-B^{a-2}) / (Gamma(1-a)(A^{a-1}-B^{a-1})).
  double num = std::tgamma(0.5) * (std::pow(A, -0.5) - std::pow(B, -0.5));
  double den = std::tgamma(-0.5) * (std::pow(A, 0.5) - std::pow(B, 0.5));
  double mean = num / den;
  Rng rng(5);
  const int n = 100000;
  double s = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    double y = sample_jump_mass(local, A, B, rng);
    s += y;
    sq += y * y;
  }
  double m = s / n, var = sq / n - m * m;
  EXPECT_NEAR(m, mean, 4 * std::sqrt(var / n));
}

TEST(Williams, StableHasNoContinuousImmigration) {
  auto mech = BranchingMechanism::stable(1.5, 2.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto ctrl = controls(0.05, 0.1);
  SpinePath spine;
  for (std::size_t k = 0; k < grid_count_below(1.0, 0.05); ++k) {
    spine.times.push_back(k * 0.05);
    spine.locations.push_back(Point{});
  }
  Rng rng(8);
  EXPECT_TRUE(sample_continuous_immigration(spine, profile, stepper, 1.0, ctrl, rng).empty());
}

TEST(Williams, ClonesRespectTruncation) {
  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto ctrl = controls(0.05, 0.1);
  auto mu = ParticleMeasure::dirac(Point::at(0.0), 1.0);
  Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    auto s = sample_williams(stepper, profile, mu, 1.0, ctrl, rng);
    EXPECT_EQ(s.assembled.size(), grid_count_below(1.0, ctrl.dt));
    EXPECT_TRUE(std::isfinite(s.initial.extinction_time) || !s.initial.states.back().empty());
    for (const auto& ev : s.events) {
      EXPECT_EQ(ev.kind, ImmigrationKind::continuous);
      EXPECT_LT(ev.birth, 1.0 - ctrl.delta);
      double age = ev.clone_extinction_time();
      EXPECT_GT(age, ctrl.delta);
      if (std::isfinite(age)) EXPECT_LT(ev.birth + age, 1.0 + 1e-9);
    }
  }
}

/*
 * Probability that the assembled measure is empty at grid time t, for
 * psi(z) = z^2 (v(t) = 1/t). The initial cluster is dead with probability
 * e^{v(h) - v(t)}. Clones of mass e born at rate r(s) = 2(v(d) - v(h-s)) are
 * conditioned on d <= H < h - s, so each is alive at t with probability
 * (e^{-e v(h-s)} - e^{-e v(max(d, t-s))}) / (e^{-e v(h-s)} - e^{-e v(d)}).
 */
TEST(Williams, EmptyFrequencyMatchesPoissonOracle) {
  const double h = 1.0, d = 0.05, dt = 0.05;
  auto v = [](double t) { return 1.0 / t; };
  const double e = 0.05 / v(d);
  auto oracle = [&](double t) {
    auto integrand = [&](double s) {
      double A = v(h - s), B = v(d);
      double rate = 2.0 * (B - A);
      double alive = (std::exp(-e * A) - std::exp(-e * v(std::max(d, t - s)))) /
                     (std::exp(-e * A) - std::exp(-e * B));
      return rate * alive;
    };
    const int m = 20000;
    double acc = 0, hs = t / m;
    for (int i = 0; i < m; ++i) acc += integrand((i + 0.5) * hs) * hs;
    return std::exp(v(h) - v(t)) * std::exp(-acc);
  };

  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto ctrl = controls(dt, d);
  auto mu = ParticleMeasure::dirac(Point::at(0.0), 1.0);
  Rng rng(2024);
  const int n = 3000;
  int empty90 = 0, empty95 = 0;
  for (int i = 0; i < n; ++i) {
    auto s = sample_williams(stepper, profile, mu, h, ctrl, rng);
    empty90 += s.assembled.states[18].empty();
    empty95 += s.assembled.states[19].empty();
  }
  for (auto [t, hits] : {std::pair{0.9, empty90}, std::pair{0.95, empty95}}) {
    double p = oracle(t);
    EXPECT_NEAR(hits / double(n), p, 4 * std::sqrt(p * (1 - p) / n)) << "t = " << t;
  }
}

// Expected count int_0^{0.95} 2 (v(0.05) - v(1 - s)) ds = 38 - 2 ln 20 for psi(z) = z^2.
TEST(Williams, ContinuousEventCountMean) {
  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto ctrl = controls(0.05, 0.05);
  SpinePath spine;
  for (std::size_t k = 0; k < grid_count_below(1.0, ctrl.dt); ++k) {
    spine.times.push_back(k * ctrl.dt);
    spine.locations.push_back(Point{});
  }
  Rng rng(31);
  const int runs = 200;
  double sum = 0;
  for (int i = 0; i < runs; ++i)
    sum += sample_continuous_immigration(spine, profile, stepper, 1.0, ctrl, rng).size();
  double expect = 38.0 - 2.0 * std::log(20.0);
  EXPECT_NEAR(sum / runs, expect, 4 * std::sqrt(expect / runs));
}

// Acceptance of the initial cluster is P(H < h) = e^{-v(h) |mu|}.
TEST(Williams, InitialImmigrationAcceptance) {
  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto ctrl = controls(0.05, 0.05);
  Rng rng(4);
  for (double mass : {1.0, 2.0}) {
    const int n = 4000;
    double attempts = 0;
    for (int i = 0; i < n; ++i) {
      auto d = sample_initial_immigration(stepper, profile, ParticleMeasure::dirac(Point{}, mass), 1.0,
                                          ctrl, rng);
      // Death after the last kept grid time is imposed, not recorded.
      if (std::isfinite(d.trajectory.extinction_time)) EXPECT_LT(d.trajectory.extinction_time, 1.0);
      attempts += d.attempts;
    }
    double p = std::exp(-mass);
    // Attempts are geometric with mean 1/p and variance (1-p)/p^2.
    EXPECT_NEAR(attempts / n, 1.0 / p, 4 * std::sqrt((1 - p) / (p * p) / n)) << "mass " << mass;
  }
}

// A clone of mass y at s is kept with probability e^{-y v(h-s)} - e^{-y v(delta)}.
TEST(Williams, CloneAcceptanceProbability) {
  auto mech = BranchingMechanism::quadratic(1.0);
  auto profile = ExtinctionProfile::homogeneous(mech);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto ctrl = controls(0.05, 0.05);
  const double y = 0.3, s = 0.32, h = 1.0;
  Rng rng(99);
  const int n = 4000;
  int kept = 0;
  ImmigrationEvent ev;
  for (int i = 0; i < n; ++i) kept += propose_clone(stepper, profile, Point{}, y, s, h, ctrl, rng, ev);
  double p = std::exp(-y / (h - s)) - std::exp(-y / ctrl.delta);
  EXPECT_NEAR(kept / double(n), p, 4 * std::sqrt(p * (1 - p) / n));
}
