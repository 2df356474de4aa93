#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "superspine/errors.hpp"
#include "superspine/extinction.hpp"
#include "superspine/sampler.hpp"
#include "superspine/transition.hpp"

using namespace superspine;

TEST(Grid, CountsAndSteps) {
  EXPECT_EQ(grid_count_below(0.3, 0.1), 3u);
  EXPECT_EQ(grid_count_below(0.25, 0.1), 3u);
  EXPECT_EQ(grid_count_below(1.0, 0.005), 200u);
  EXPECT_EQ(steps_in(1.0, 0.1, "t"), 10u);
  EXPECT_THROW(steps_in(0.25, 0.1, "t"), std::exception);
  auto ts = uniform_times(0.1, 4);
  ASSERT_EQ(ts.size(), 5u);
  EXPECT_DOUBLE_EQ(ts[3], 3 * 0.1);
}

// Feller diffusion with psi(z) = z^2: P(X_1 = 0) = e^{-1}, E X_1 = 1.
TEST(Csbp, ExactTransitionLaw) {
  Rng rng(4);
  const int n = 40000;
  int zero = 0;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    double m = sample_csbp_exact(1.0, 1.0, 1.0, rng);
    zero += m == 0.0;
    sum += m;
  }
  double p0 = std::exp(-1.0);
  EXPECT_NEAR(zero / double(n), p0, 4 * std::sqrt(p0 * (1 - p0) / n));
  // Var X_1 = 2 b t m = 2.
  EXPECT_NEAR(sum / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Particles, SubcriticalMeanAndExtinction) {
  auto mech = BranchingMechanism::quadratic(2.0, -0.5);
  auto motion = MotionModel::brownian(1, 1.0);
  SuperprocessStepper stepper(mech, motion, ParticleControls{});
  auto mu = ParticleMeasure::dirac(Point::at(0.0), 1.0);
  auto times = uniform_times(0.05, 20);
  Rng rng(9);
  const int n = 20000;
  double sum = 0, sq = 0;
  int dead = 0;
  for (int i = 0; i < n; ++i) {
    auto rec = sample_superprocess(stepper, mu, times, rng);
    double m = rec.states.size() == times.size() ? rec.mass_at(times.size() - 1) : 0.0;
    sum += m;
    sq += m * m;
    dead += m == 0.0;
  }
  double mean = sum / n, var = sq / n - mean * mean;
  EXPECT_NEAR(mean, std::exp(-0.5), 4 * std::sqrt(var / n));
  // v(1) = 0.5 / (2 (e^{0.5} - 1)).
  double p0 = std::exp(-0.25 / (std::exp(0.5) - 1.0));
  EXPECT_NEAR(dead / double(n), p0, 4 * std::sqrt(p0 * (1 - p0) / n));
}

TEST(Particles, RecordStopsAtZero) {
  auto mech = BranchingMechanism::quadratic(50.0);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto times = uniform_times(0.1, 30);
  Rng rng(2);
  auto rec = sample_superprocess(stepper, ParticleMeasure::dirac(Point::at(0.0), 0.1), times, rng);
  ASSERT_TRUE(std::isfinite(rec.extinction_time));
  EXPECT_TRUE(rec.states.back().empty());
  EXPECT_DOUBLE_EQ(rec.times.back(), rec.extinction_time);
  for (std::size_t k = 0; k + 1 < rec.size(); ++k) EXPECT_FALSE(rec.states[k].empty());
}

TEST(Particles, AtomSplittingKeepsMassBelowCeiling) {
  auto mech = BranchingMechanism::quadratic(0.1);
  ParticleControls ctrl;
  ctrl.kappa = 0.05;
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ctrl);
  auto state = ParticleMeasure::dirac(Point::at(0.0), 3.0);
  Rng rng(6);
  for (int k = 0; k < 5; ++k) stepper.advance(state, 0.02, rng);
  for (const auto& a : state.atoms) EXPECT_LE(a.mass, 2 * ctrl.kappa + 1e-12);
}

TEST(Conditioned, DirectSamplerHitsTheBin) {
  auto mech = BranchingMechanism::quadratic(1.0);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto mu = ParticleMeasure::dirac(Point::at(0.0), 1.0);
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    auto draw = sample_conditioned_direct(stepper, mu, 0.5, 0.05, 0.01, rng);
    const auto& tr = draw.trajectory;
    std::size_t k = tr.index_of(0.5);
    ASSERT_NE(k, static_cast<std::size_t>(-1));
    EXPECT_FALSE(tr.states[k].empty());
    EXPECT_GT(tr.extinction_time, 0.5);
    EXPECT_LE(tr.extinction_time, 0.55 + 1e-9);
  }
  EXPECT_THROW(sample_conditioned_direct(stepper, mu, 0.5, 0.005, 0.01, rng), ConfigError);
}

TEST(Conditioned, BudgetExhaustionIsInfeasible) {
  auto mech = BranchingMechanism::quadratic(1.0);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  Rng rng(1);
  // Alive at 5 from mass 0.01 has probability about 0.002.
  EXPECT_THROW(sample_conditioned_direct(stepper, ParticleMeasure::dirac(Point::at(0.0), 0.01), 5.0,
                                         0.05, 0.05, rng, 3),
               InfeasibleError);
}

TEST(Martingale, WeightAtTimeZeroIsOne) {
  auto profile = ExtinctionProfile::homogeneous(BranchingMechanism::quadratic(1.0, -0.3));
  auto mu = ParticleMeasure::dirac(Point::at(0.2), 1.5);
  EXPECT_NEAR(mweight(profile, mu, 1.0, 0.0, mu), 1.0, 1e-12);
  EXPECT_EQ(mweight(profile, mu, 1.0, 0.5, ParticleMeasure{}), 0.0);
  EXPECT_THROW(mweight(profile, mu, 1.0, 1.0, mu), std::invalid_argument);
}

// Acceptance of the direct sampler is F_H(1.02) - F_H(1) = e^{-1/1.02} - e^{-1}.
TEST(Conditioned, DirectAcceptanceRate) {
  auto mech = BranchingMechanism::quadratic(1.0);
  SuperprocessStepper stepper(mech, MotionModel::brownian(1, 1.0), ParticleControls{});
  auto mu = ParticleMeasure::dirac(Point::at(0.0), 1.0);
  Rng rng(15);
  const int n = 300;
  double attempts = 0;
  for (int i = 0; i < n; ++i) attempts += sample_conditioned_direct(stepper, mu, 1.0, 0.02, 0.01, rng).attempts;
  double p = std::exp(-1.0 / 1.02) - std::exp(-1.0);
  EXPECT_NEAR(attempts / n, 1.0 / p, 4 * std::sqrt((1 - p) / (p * p) / n));
}

// quadratic b = 1, h = 1, t = 0.5: M = 4 m e^{-2m} / e^{-1}.
TEST(Martingale, ClosedFormWeight) {
  auto profile = ExtinctionProfile::homogeneous(BranchingMechanism::quadratic(1.0));
  auto mu = ParticleMeasure::dirac(Point{}, 1.0);
  for (double m : {0.1, 0.5, 2.0}) {
    auto xt = ParticleMeasure::dirac(Point::at(0.7), m);
    EXPECT_NEAR(mweight(profile, mu, 1.0, 0.5, xt), 4 * m * std::exp(-2 * m) / std::exp(-1.0), 1e-12);
  }
}
