#include "superspine/rng.hpp"

#include <cmath>

namespace superspine {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(master);
  std::uint64_t position = 0;
  for (auto k : keys) {
    ++position;
    h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL * position));
  }
  return h;
}

double Rng::uniform() {
  for (;;) {
    double u = std::generate_canonical<double, 53>(engine_);
    if (u > 0.0 && u < 1.0) return u;
  }
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(engine_);
}

double Rng::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

}  // namespace superspine
