#include "superspine/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "superspine/numerics.hpp"

namespace superspine {

double kolmogorov_tail(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form, accurate for small lambda.
    double y = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k < 40; k += 2) sum += std::pow(y, k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  double en = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_tail((en + 0.12 + 0.11 / en) * d)};
}

namespace {

double dist(const Pair& p, const Pair& q) { return std::hypot(p[0] - q[0], p[1] - q[1]); }

std::vector<Pair> thin(std::span<const Pair> xs, std::size_t cap) {
  if (xs.size() <= cap) return {xs.begin(), xs.end()};
  std::vector<Pair> out(cap);
  for (std::size_t i = 0; i < cap; ++i) out[i] = xs[i * xs.size() / cap];
  return out;
}

// Energy distance from a full distance matrix and a split of indices.
double energy_from_matrix(const std::vector<double>& dm, std::size_t n,
                          const std::vector<std::size_t>& idx, std::size_t na) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  std::size_t nb = n - na;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      double d = dm[idx[p] * n + idx[q]];
      bool pa = p < na, qa = q < na;
      if (pa && qa) xx += d;
      else if (!pa && !qa) yy += d;
      else xy += d;
    }
  }
  double fa = static_cast<double>(na), fb = static_cast<double>(nb);
  return 2.0 * xy / (fa * fb) - 2.0 * xx / (fa * fa) - 2.0 * yy / (fb * fb);
}

}  // namespace

double energy_distance(std::span<const Pair> a, std::span<const Pair> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy_distance: empty sample");
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (const auto& p : a)
    for (const auto& q : b) xy += dist(p, q);
  for (const auto& p : a)
    for (const auto& q : a) xx += dist(p, q);
  for (const auto& p : b)
    for (const auto& q : b) yy += dist(p, q);
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  return 2.0 * xy / (na * nb) - xx / (na * na) - yy / (nb * nb);
}

TestResult energy_test(std::span<const Pair> a, std::span<const Pair> b, std::size_t permutations,
                       Rng& rng, std::size_t max_per_side) {
  auto x = thin(a, max_per_side);
  auto y = thin(b, max_per_side);
  if (x.empty() || y.empty()) throw std::invalid_argument("energy_test: empty sample");
  std::vector<Pair> all(x);
  all.insert(all.end(), y.begin(), y.end());
  const std::size_t n = all.size(), na = x.size();
  std::vector<double> dm(n * n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) dm[p * n + q] = dist(all[p], all[q]);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  double observed = energy_from_matrix(dm, n, idx, na);
  std::size_t at_least = 1;
  for (std::size_t r = 0; r < permutations; ++r) {
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    if (energy_from_matrix(dm, n, idx, na) >= observed) ++at_least;
  }
  return {observed, static_cast<double>(at_least) / static_cast<double>(permutations + 1)};
}

TestResult two_proportion_test(std::size_t hits_a, std::size_t n_a, std::size_t hits_b,
                               std::size_t n_b) {
  if (n_a == 0 || n_b == 0) throw std::invalid_argument("two_proportion_test: empty sample");
  double pa = static_cast<double>(hits_a) / n_a, pb = static_cast<double>(hits_b) / n_b;
  double pooled = static_cast<double>(hits_a + hits_b) / static_cast<double>(n_a + n_b);
  double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n_a + 1.0 / n_b));
  if (se == 0.0) return {0.0, pa == pb ? 1.0 : 0.0};
  double z = (pa - pb) / se;
  return {z, 2.0 * (1.0 - normal_cdf(std::abs(z)))};
}

Estimate mean_estimate(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean_estimate: empty sample");
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty sample");
  std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  double hi = xs[mid];
  if (xs.size() % 2) return hi;
  double lo = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lo + hi);
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("correlation: bad sizes");
  auto ma = mean_estimate(a).value, mb = mean_estimate(b).value;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double dispersion_index(std::span<const double> counts) {
  auto e = mean_estimate(counts);
  double n = static_cast<double>(counts.size());
  double var = e.std_error * e.std_error * n;
  return e.value > 0.0 ? var / e.value : 0.0;
}

}  // namespace superspine
