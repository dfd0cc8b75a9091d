#include "sdm/losses.hpp"

#include <algorithm>
#include <cmath>

#include "sdm/error.hpp"
#include "sdm/linalg.hpp"

namespace sdm {

std::string LossKind::name() const {
  switch (kind) {
    case Kind::ce:
      return "ce";
    case Kind::nprob:
      return "nprob";
    case Kind::dpdr:
      return "dpdr(" + std::to_string(stage) + ")";
    case Kind::margin:
      return "margin";
  }
  return "?";
}

namespace {

void check_stage(std::size_t n, std::size_t k) {
  if (n < 2 || n > k) {
    throw ContractError("DPDR stage n=" + std::to_string(n) + " outside [2," + std::to_string(k) +
                        "]");
  }
}

double tau_gap(const LabelInfo& info, const ProbVector& p, std::size_t n) {
  return p[info.tau] - info.nth_largest(n);
}

}  // namespace

double nprob_loss(const ProbVector& p, std::size_t y) {
  if (y >= p.size()) throw ContractError("nprob_loss: label out of range");
  return -p[y];
}

double dpdr_phi(std::span<const ProbVector> probs, std::span<const std::uint32_t> labels,
                std::size_t n) {
  if (probs.empty()) throw ContractError("dpdr_phi: empty batch");
  if (probs.size() != labels.size()) throw ContractError("dpdr_phi: labels/probabilities mismatch");
  double max_gap = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    check_stage(n, probs[i].size());
    const auto info = label_info(probs[i], labels[i]);
    const double gap = tau_gap(info, probs[i], n);
    if (first || gap > max_gap) max_gap = gap;
    first = false;
  }
  return 0.5 * max_gap;
}

double dpdr_denominator(const ProbVector& p, std::size_t y, std::size_t n, const DpdrContext& ctx) {
  check_stage(n, p.size());
  if (!(ctx.zeta > 0.0) || !(ctx.phi >= 0.0)) throw ContractError("DPDR needs zeta > 0, phi >= 0");
  const auto info = label_info(p, y);
  const double s = sign(p[info.tau] - p[y]);
  return ctx.phi - s * (tau_gap(info, p, n) - ctx.phi) + ctx.zeta;
}

double dpdr_loss(const ProbVector& p, std::size_t y, std::size_t n, const DpdrContext& ctx) {
  const double denom = dpdr_denominator(p, y, n, ctx);
  const auto tau = argmax_excluding(p.values(), y);
  const double value = (p[tau] - p[y]) / denom;
  if (!std::isfinite(value)) throw NumericError("DPDR loss is not finite");
  return value;
}

double margin_loss(std::span<const double> scores, std::size_t y) {
  if (y >= scores.size()) throw ContractError("margin_loss: label out of range");
  const auto other = argmax_excluding(scores, y);
  return -(scores[y] - scores[other]);
}

double loss_value(const LossKind& kind, std::span<const double> scores, std::size_t y,
                  const DpdrContext& ctx) {
  switch (kind.kind) {
    case LossKind::Kind::ce:
      return ce_loss(scores, y);
    case LossKind::Kind::nprob:
      return nprob_loss(softmax(scores), y);
    case LossKind::Kind::dpdr:
      return dpdr_loss(softmax(scores), y, kind.stage, ctx);
    case LossKind::Kind::margin:
      return margin_loss(scores, y);
  }
  throw ContractError("unknown loss kind");
}

Vec loss_grad_wrt_scores(const LossKind& kind, std::span<const double> scores, std::size_t y,
                         const DpdrContext& ctx, TieCounter* ties) {
  const std::size_t k = scores.size();
  if (y >= k) throw ContractError("loss gradient: label out of range");
  switch (kind.kind) {
    case LossKind::Kind::ce: {
      const auto p = softmax(scores);
      Vec g(p.values().begin(), p.values().end());
      g[y] -= 1.0;
      return g;
    }
    case LossKind::Kind::nprob: {
      const auto p = softmax(scores);
      Vec dl_dp(k, 0.0);
      dl_dp[y] = -1.0;
      return softmax_backward(p, dl_dp);
    }
    case LossKind::Kind::margin: {
      Vec g(k, 0.0);
      g[argmax_excluding(scores, y)] += 1.0;
      g[y] -= 1.0;
      return g;
    }
    case LossKind::Kind::dpdr: {
      const std::size_t n = kind.stage;
      const auto p = softmax(scores);
      const double denom = dpdr_denominator(p, y, n, ctx);
      const auto info = label_info(p, y);
      const double numer = p[info.tau] - p[y];
      const double s = sign(numer);
      const std::size_t idx_n = info.n_index(n);

      if (ties != nullptr) {
        const double pn = info.sorted[n - 1];
        const bool tie_above = std::abs(info.sorted[n - 2] - pn) <= 1e-12;
        const bool tie_below = n < k && std::abs(info.sorted[n] - pn) <= 1e-12;
        if (tie_above || tie_below) ties->count.fetch_add(1, std::memory_order_relaxed);
      }

      // Quotient rule over dN/dP = e_tau - e_y and dD/dP = -s (e_tau - e_idx(n)).
      Vec dl_dp(k, 0.0);
      const double inv_d = 1.0 / denom;
      const double ratio = numer * inv_d * inv_d;
      dl_dp[info.tau] += inv_d;
      dl_dp[y] -= inv_d;
      dl_dp[info.tau] -= ratio * (-s);
      dl_dp[idx_n] -= ratio * s;
      return softmax_backward(p, dl_dp);
    }
  }
  throw ContractError("unknown loss kind");
}

}  // namespace sdm
