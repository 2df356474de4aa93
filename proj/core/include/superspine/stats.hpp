#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "superspine/motion.hpp"
#include "superspine/rng.hpp"

namespace superspine {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

//! Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
//! (Stephens' small-sample correction of the effective size).
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);
//! Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_tail(double lambda);

using Pair = std::array<double, 2>;

//! Energy distance 2E|X-Y| - E|X-X'| - E|Y-Y'| between two point clouds.
double energy_distance(std::span<const Pair> a, std::span<const Pair> b);
/*!
 * Permutation test on the energy distance. Each side is thinned to at most
 * max_per_side points (evenly spaced indices) before permuting.
 */
TestResult energy_test(std::span<const Pair> a, std::span<const Pair> b, std::size_t permutations,
                       Rng& rng, std::size_t max_per_side = 1000);

//! Pooled two-proportion z-test, two-sided.
TestResult two_proportion_test(std::size_t hits_a, std::size_t n_a, std::size_t hits_b,
                               std::size_t n_b);

Estimate mean_estimate(std::span<const double> xs);
double median(std::vector<double> xs);
double correlation(std::span<const double> a, std::span<const double> b);
//! Variance over mean of counts.
double dispersion_index(std::span<const double> counts);

}  // namespace superspine
