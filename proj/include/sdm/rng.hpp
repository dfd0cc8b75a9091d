#pragma once

#include <cstdint>

namespace sdm {

/// Counter-based generator: output i of stream s is a pure function of
/// (seed, s, i), so per-example substreams are independent of scheduling.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t z);

}  // namespace sdm
