#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace superspine {

//! SplitMix64 finalizer; bijective 64-bit mixer.
std::uint64_t splitmix64(std::uint64_t z);

/*!
 * Derive an independent stream seed from a master seed and a key path.
 *
 * The key path names the stream (replica index, stream role, attempt
 * number, ...). Derivation is counter-based: it depends only on the keys,
 * never on how many streams were derived before, so results do not depend
 * on scheduling or worker count.
 */
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

//! Random stream: one mt19937_64 engine plus the few draws the samplers use.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derived(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(master, keys));
  }

  engine_type& engine() { return engine_; }

  std::uint64_t next_u64() { return engine_(); }
  //! Uniform on the open interval (0, 1).
  double uniform();
  double normal() { return normal_(engine_); }
  double exponential() { return -std::log(uniform()); }
  std::uint64_t poisson(double mean);
  //! Gamma with the given shape and unit scale.
  double gamma(double shape);

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace superspine
