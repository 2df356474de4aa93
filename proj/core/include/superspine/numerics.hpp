#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace superspine {

//! Quadrature rule: nodes and weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

//! Gauss-Hermite rule for E[g(Z)], Z standard normal (weights sum to 1).
QuadratureRule gauss_hermite_normal(int n);
//! Gauss-Legendre rule on [0, 1] (weights sum to 1).
QuadratureRule gauss_legendre_unit(int n);

double normal_quantile(double p);
double normal_cdf(double x);

//! Adaptive Gauss-Kronrod integral of f over [a, b] (finite).
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);
//! Integral of f over [a, inf) for a > 0 (double-exponential rule).
double integrate_to_infinity(const std::function<double(double)>& f, double a, double tol = 1e-12);

//! Run body(i) for i in [0, n) on up to `workers` threads (0 = hardware).
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace superspine

namespace superspine {

//! 64-bit FNV-1a hash of the text as 16 lowercase hex digits.
std::string fingerprint(const std::string& text);

}  // namespace superspine
