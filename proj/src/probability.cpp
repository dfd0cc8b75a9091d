#include "sdm/probability.hpp"

#include <algorithm>
#include <cmath>

#include "sdm/error.hpp"
#include "sdm/linalg.hpp"

namespace sdm {

ProbVector::ProbVector(Vec p) : p_(std::move(p)) {
  if (p_.size() < 3) throw ContractError("probability vector needs K >= 3");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ContractError("probability entry outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ContractError("probabilities do not sum to 1");
}

ProbVector softmax(std::span<const double> scores) {
  if (scores.size() < 3) throw ContractError("softmax needs K >= 3 logits");
  if (!all_finite(scores)) throw ContractError("softmax: non-finite logits");
  const double m = *std::max_element(scores.begin(), scores.end());
  Vec p(scores.size());
  double z = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(scores[k] - m);
    z += p[k];
  }
  for (double& v : p) v /= z;
  return ProbVector(std::move(p), ProbVector::Unchecked{});
}

double ce_loss(std::span<const double> scores, std::size_t y) {
  if (y >= scores.size()) throw ContractError("ce_loss: label out of range");
  const double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - m);
  return (m + std::log(z)) - scores[y];
}

std::size_t LabelInfo::n_index(std::size_t n) const {
  if (n < 1 || n > perm.size()) {
    throw ContractError("n_index: n=" + std::to_string(n) + " outside [1," +
                        std::to_string(perm.size()) + "]");
  }
  return perm[n - 1];
}

double LabelInfo::nth_largest(std::size_t n) const {
  n_index(n);
  return sorted[n - 1];
}

LabelInfo label_info(const ProbVector& p, std::size_t y) {
  if (y >= p.size()) throw ContractError("label_info: label out of range");
  LabelInfo info;
  info.y = y;
  info.tau = argmax_excluding(p.values(), y);
  auto s = sort_descending(p.values());
  info.sorted = std::move(s.sorted);
  info.perm = std::move(s.perm);
  return info;
}

double phi_sq_sum(const ProbVector& p) {
  double s = 0.0;
  for (double v : p.values()) s += v * v;
  return s;
}

namespace {

void require_interior(double pk, const char* what) {
  if (!(pk < 1.0)) throw SingularityError(std::string(what) + ": probability is one-hot (P = 1)");
}

void require_index(const ProbVector& p, std::size_t k) {
  if (k >= p.size()) throw ContractError("label index out of range");
}

}  // namespace

Vec grad_reduce_py(const ProbVector& p, std::size_t y) {
  require_index(p, y);
  require_interior(p[y], "grad_reduce_py");
  Vec g(p.values().begin(), p.values().end());
  g[y] -= 1.0;
  const double scale = 1.0 / (1.0 - p[y]);
  for (double& v : g) v *= scale;
  return g;
}

Vec grad_raise_ptau(const ProbVector& p, std::size_t tau) {
  require_index(p, tau);
  require_interior(p[tau], "grad_raise_ptau");
  Vec g(p.values().begin(), p.values().end());
  g[tau] -= 1.0;
  const double scale = 1.0 / (p[tau] - 1.0);
  for (double& v : g) v *= scale;
  return g;
}

namespace {

double sq_sum_except(const ProbVector& p, std::size_t a, std::size_t b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k != a && k != b) acc += p[k] * p[k];
  }
  return acc;
}

// P_y + P_tau - sum_k P_k^2, arranged without subtracting near-equal terms.
double direction_numerator(const ProbVector& p, std::size_t y, std::size_t tau) {
  return p[y] * (1.0 - p[y]) + p[tau] * (1.0 - p[tau]) - sq_sum_except(p, y, tau);
}

}  // namespace

double direction_inner_product(const ProbVector& p, std::size_t y, std::size_t tau) {
  require_index(p, y);
  require_index(p, tau);
  if (y == tau) throw ContractError("direction_inner_product: y == tau");
  require_interior(p[y], "direction_inner_product");
  require_interior(p[tau], "direction_inner_product");
  return direction_numerator(p, y, tau) / ((1.0 - p[y]) * (1.0 - p[tau]));
}

double direction_cosine(const ProbVector& p, std::size_t y, std::size_t tau) {
  require_index(p, y);
  require_index(p, tau);
  if (y == tau) throw ContractError("direction_cosine: y == tau");
  require_interior(p[y], "direction_cosine");
  require_interior(p[tau], "direction_cosine");
  // phi - 2 P_j + 1 rewritten as (1 - P_j)^2 + sum_{k != j} P_k^2 to avoid cancellation near P_j = 1.
  const double sq_y = sq_sum_except(p, y, y), sq_tau = sq_sum_except(p, tau, tau);
  const double ny = (1.0 - p[y]) * (1.0 - p[y]) + sq_y;
  const double nt = (1.0 - p[tau]) * (1.0 - p[tau]) + sq_tau;
  return direction_numerator(p, y, tau) / std::sqrt(ny * nt);
}

Vec softmax_backward(const ProbVector& p, std::span<const double> dl_dp) {
  if (dl_dp.size() != p.size()) throw ContractError("softmax_backward: length mismatch");
  double inner = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) inner += p[k] * dl_dp[k];
  Vec out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k] * (dl_dp[k] - inner);
  return out;
}

}  // namespace sdm
