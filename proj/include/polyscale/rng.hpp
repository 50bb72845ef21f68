#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace polyscale {

std::uint64_t splitmix64(std::uint64_t x);

/// Stream splitting: seed_k = splitmix64(seed_{k-1} ^ splitmix64(key_k)),
/// folded over the keys left to right. derive_seed(master, {replica, chain})
/// gives the stream of one chain of one replica.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  double exponential() { return -std::log(uniform_pos()); }
  bool coin() { return (engine_() >> 63) != 0; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace polyscale
