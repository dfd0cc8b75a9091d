#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdm/tensor.hpp"

namespace sdm {

/// A point on the probability simplex with K >= 3 entries.
class ProbVector {
 public:
  /// Validates entries in [0,1] summing to 1 within 1e-12.
  explicit ProbVector(Vec p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }
  std::span<const double> values() const { return p_; }

 private:
  struct Unchecked {};
  ProbVector(Vec p, Unchecked) : p_(std::move(p)) {}
  friend ProbVector softmax(std::span<const double> scores);

  Vec p_;
};

/// Derived indices of a probability vector relative to a ground-truth label.
struct LabelInfo {
  std::size_t y = 0;
  std::size_t tau = 0;          // stable argmax over k != y
  Vec sorted;                   // descending
  std::vector<std::size_t> perm;  // sorted[i] == P[perm[i]]

  /// Original index of the n-th largest probability, 1 <= n <= K.
  std::size_t n_index(std::size_t n) const;
  /// n-th largest probability value, 1 <= n <= K.
  double nth_largest(std::size_t n) const;
};

ProbVector softmax(std::span<const double> scores);

/// -log softmax(S)_y by log-sum-exp.
double ce_loss(std::span<const double> scores, std::size_t y);

LabelInfo label_info(const ProbVector& p, std::size_t y);

/// Sum of squared probabilities; lies in [1/K, 1].
double phi_sq_sum(const ProbVector& p);

// Closed-form directions of P for "reduce P_y" and "raise P_tau", and their
// inner product and cosine. All throw SingularityError at a one-hot vertex.

/// (1/(1-P_y)) * (P_1, ..., P_y - 1, ..., P_K)
Vec grad_reduce_py(const ProbVector& p, std::size_t y);
/// (1/(P_tau-1)) * (P_1, ..., P_tau - 1, ..., P_K)
Vec grad_raise_ptau(const ProbVector& p, std::size_t tau);
/// (P_y + P_tau - Phi) / ((1-P_y)(1-P_tau))
double direction_inner_product(const ProbVector& p, std::size_t y, std::size_t tau);
/// (P_y + P_tau - Phi) / sqrt((Phi - 2P_y + 1)(Phi - 2P_tau + 1))
double direction_cosine(const ProbVector& p, std::size_t y, std::size_t tau);

/// J^T g for the softmax Jacobian J = diag(P) - P P^T, i.e. dL/dS from dL/dP.
Vec softmax_backward(const ProbVector& p, std::span<const double> dl_dp);

}  // namespace sdm
