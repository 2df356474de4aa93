#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "superspine/stats.hpp"

using namespace superspine;

// Reference values computed independently (scipy.stats and numpy).
TEST(Stats, KolmogorovTail) {
  EXPECT_NEAR(kolmogorov_tail(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(kolmogorov_tail(0.5), 0.9639452436648751, 1e-12);
  EXPECT_NEAR(kolmogorov_tail(0.0), 1.0, 1e-12);
}

TEST(Stats, KsTwoSample) {
  std::vector<double> a{0.1, 0.4, 0.7, 1.3, 2.2, 2.9};
  std::vector<double> b{0.5, 0.9, 1.8, 2.5, 3.1, 3.3, 4.0};
  auto r = ks_two_sample(a, b);
  EXPECT_NEAR(r.statistic, 0.42857142857142855, 1e-12);
  EXPECT_NEAR(r.p_value, 0.46838502154475375, 1e-9);
  std::vector<double> far{10.1, 10.4};
  EXPECT_EQ(ks_two_sample(a, far).statistic, 1.0);
  auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_NEAR(same.p_value, 1.0, 1e-12);
}

TEST(Stats, EnergyDistance) {
  std::vector<Pair> a{{0, 0}, {1, 0}, {0, 2}};
  std::vector<Pair> b{{1, 1}, {3, 0}};
  EXPECT_NEAR(energy_distance(a, b), 1.8630548163202114, 1e-12);
  EXPECT_NEAR(energy_distance(a, a), 0.0, 1e-12);
}

TEST(Stats, EnergyTestSeparatesShiftedClouds) {
  Rng rng(3);
  std::vector<Pair> a, b, c;
  for (int i = 0; i < 150; ++i) {
    a.push_back({rng.normal(), rng.normal()});
    b.push_back({rng.normal() + 1.0, rng.normal()});
    c.push_back({rng.normal(), rng.normal()});
  }
  EXPECT_LT(energy_test(a, b, 199, rng).p_value, 0.01);
  EXPECT_GT(energy_test(a, c, 199, rng).p_value, 0.001);
}

TEST(Stats, TwoProportion) {
  auto r = two_proportion_test(30, 100, 45, 100);
  EXPECT_NEAR(r.statistic, -2.1908902300206647, 1e-12);
  EXPECT_NEAR(r.p_value, 0.02845973691631055, 1e-12);
}

TEST(Stats, Summaries) {
  std::vector<double> xs{1, 2, 3, 4};
  auto e = mean_estimate(xs);
  EXPECT_DOUBLE_EQ(e.value, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-12);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
  std::vector<double> ys{2, 4, 6, 8};
  EXPECT_NEAR(correlation(xs, ys), 1.0, 1e-12);
  std::vector<double> counts{2, 2, 2};
  EXPECT_DOUBLE_EQ(dispersion_index(counts), 0.0);
}

// Property: under the null the KS p-value is roughly uniform.
TEST(Stats, KsNullRejectionRate) {
  Rng rng(17);
  int rejects = 0;
  const int runs = 400;
  for (int r = 0; r < runs; ++r) {
    std::vector<double> a(200), b(200);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    rejects += ks_two_sample(a, b).p_value < 0.05;
  }
  EXPECT_LT(rejects / double(runs), 0.05 + 4 * std::sqrt(0.05 * 0.95 / runs));
}
