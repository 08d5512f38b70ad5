#include "dpmimo/random.hpp"

#include <cmath>

namespace dpmimo {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = splitmix64(master);
  for (std::uint64_t key : path) {
    state = splitmix64(state ^ splitmix64(key + 0x632be59bd9b4e019ULL));
  }
  return state;
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

double RandomStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double RandomStream::normal(double mean, double stddev) {
  return mean + stddev * normal_(engine_);
}

std::complex<double> RandomStream::complex_normal() {
  static const double kHalfStd = std::sqrt(0.5);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kHalfStd * re, kHalfStd * im};
}

}  // namespace dpmimo
