#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpmimo {

/// Mixes a master seed with a path of integer keys into an independent
/// substream seed (splitmix64 chain). Same inputs give the same seed on every
/// platform.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Deterministic random stream. Not thread-safe; give each worker its own.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  /// Circularly symmetric CN(0, 1): real and imaginary parts i.i.d. N(0, 1/2).
  std::complex<double> complex_normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace dpmimo
