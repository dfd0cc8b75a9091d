#include "sdm/rng.hpp"

#include <cmath>
#include <numbers>

namespace sdm {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(splitmix64(seed ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL))) {}

std::uint64_t SeededRng::next_u64() {
  // Two rounds over (key, counter) so that adjacent counters decorrelate.
  const std::uint64_t c = counter_++;
  return splitmix64(splitmix64(key_ + c * 0x9E3779B97F4A7C15ULL) ^ key_);
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SeededRng::below(std::uint64_t n) {
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r = next_u64();
  while (r >= limit) r = next_u64();
  return r % n;
}

}  // namespace sdm
