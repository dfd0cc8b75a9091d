#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sdm/probability.hpp"
#include "sdm/rng.hpp"

namespace sdm::testing {

// The two printed score rows of the worked example (ten classes, ground truth
// at zero-based index 3).
inline const std::array<double, 10> kScoresFailed{0.314, -1.267, -0.126, 1.438,  0.264,
                                                  1.036, 0.191,  -0.118, -0.498, -1.041};
inline const std::array<double, 10> kScoresSucceeded{-0.674, -1.434, -0.398, 2.864,  -0.488,
                                                     3.367,  -0.371, -0.613, -1.421, -0.833};
inline constexpr std::size_t kWorkedLabel = 3;

// Symmetric Dirichlet(1) via normalized exponentials, rejecting draws with
// any coordinate below 1e-6.
inline Vec dirichlet_one(SeededRng& rng, std::size_t k) {
  for (;;) {
    Vec p(k);
    double total = 0.0;
    for (auto& v : p) {
      double u = rng.uniform();
      while (u <= 0.0) u = rng.uniform();
      v = -std::log(u);
      total += v;
    }
    for (auto& v : p) v /= total;
    if (*std::min_element(p.begin(), p.end()) >= 1e-6) return p;
  }
}

// Logits whose softmax is p (log p, shifted to zero mean).
inline Vec logits_for(const Vec& p) {
  Vec s(p.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) mean += (s[i] = std::log(p[i]));
  mean /= static_cast<double>(p.size());
  for (auto& v : s) v -= mean;
  return s;
}

// Indices of the two largest entries (largest first).
inline std::pair<std::size_t, std::size_t> top_two(const Vec& p) {
  std::size_t a = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[a]) a = i;
  }
  std::size_t b = a == 0 ? 1 : 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != a && p[i] > p[b]) b = i;
  }
  return {a, b};
}

inline double rel_err(const Vec& got, const Vec& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

}  // namespace sdm::testing
