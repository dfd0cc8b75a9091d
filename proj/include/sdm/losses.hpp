#pragma once

#include <atomic>
#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sdm/probability.hpp"

namespace sdm {

/// Attack objective. DPDR carries its stage index n (2 <= n <= K).
struct LossKind {
  enum class Kind { ce, nprob, dpdr, margin };
  Kind kind = Kind::ce;
  std::size_t stage = 0;

  static LossKind ce() { return {Kind::ce, 0}; }
  static LossKind nprob() { return {Kind::nprob, 0}; }
  static LossKind dpdr(std::size_t n) { return {Kind::dpdr, n}; }
  static LossKind margin() { return {Kind::margin, 0}; }

  std::string name() const;
  friend bool operator==(const LossKind&, const LossKind&) = default;
};

inline constexpr double kDefaultZeta = 1e-10;

/// Batch-level quantities held constant while differentiating DPDR.
struct DpdrContext {
  double zeta = kDefaultZeta;
  double phi = 0.0;
};

/// Counts gradients evaluated where P`_n ties a neighbour within 1e-12; the
/// gradient is still returned with the detached permutation.
struct TieCounter {
  std::atomic<std::size_t> count{0};
};

double nprob_loss(const ProbVector& p, std::size_t y);

/// 0.5 * max over the batch of (P_tau - P`_n).
double dpdr_phi(std::span<const ProbVector> probs, std::span<const std::uint32_t> labels,
                std::size_t n);

/// Denominator of the DPDR ratio; >= zeta whenever phi is the batch value.
double dpdr_denominator(const ProbVector& p, std::size_t y, std::size_t n, const DpdrContext& ctx);

double dpdr_loss(const ProbVector& p, std::size_t y, std::size_t n, const DpdrContext& ctx);

/// -(S_y - max_{k != y} S_k); positive iff the example is misclassified.
double margin_loss(std::span<const double> scores, std::size_t y);

/// Loss value for any kind. `ctx` is read only for DPDR.
double loss_value(const LossKind& kind, std::span<const double> scores, std::size_t y,
                  const DpdrContext& ctx = {});

/// dL/dS with phi, sign(.) and the sort permutation detached.
Vec loss_grad_wrt_scores(const LossKind& kind, std::span<const double> scores, std::size_t y,
                         const DpdrContext& ctx = {}, TieCounter* ties = nullptr);

}  // namespace sdm
