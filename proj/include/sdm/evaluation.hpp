#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdm/dataset.hpp"
#include "sdm/mlp.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

struct ExampleRecord {
  std::size_t index = 0;
  bool success = false;
  double ce_loss = 0.0;
  double p_y = 0.0;
  double p_tau = 0.0;
  double linf_norm = 0.0;
  double l2_norm = 0.0;

  friend bool operator==(const ExampleRecord&, const ExampleRecord&) = default;
};

struct EvalReport {
  std::vector<ExampleRecord> records;
  double attack_success_rate = 0.0;
  double mean_ce_loss = 0.0;

  std::vector<bool> success_mask() const;
  std::vector<double> ce_losses() const;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// One forward pass per example; success iff the stable argmax differs from
/// the label. Perturbation norms are measured against `naturals` when given.
EvalReport evaluate(const MlpModel& model, const Tensor& inputs,
                    std::span<const std::uint32_t> labels, const Tensor* naturals = nullptr);

struct PairComparison {
  std::string a;
  std::string b;
  double intersection = 0.0;  // |A n B| / n
  double a_minus_b = 0.0;     // |A \ B| / n
  double b_minus_a = 0.0;     // |B \ A| / n
  std::size_t count_intersection = 0;
  std::size_t count_a_minus_b = 0;
  std::size_t count_b_minus_a = 0;
};

struct SetComparison {
  std::size_t n = 0;
  std::vector<std::string> methods;
  std::vector<std::vector<bool>> masks;
  std::vector<PairComparison> pairs;  // every unordered pair, in method order

  const PairComparison& pair(const std::string& a, const std::string& b) const;
};

SetComparison success_set_analysis(const std::vector<std::string>& methods,
                                   const std::vector<std::vector<bool>>& masks);

/// Mean of `values` over indices in A \ B; empty set gives nullopt.
std::optional<double> mean_over_difference(const std::vector<bool>& a, const std::vector<bool>& b,
                                           const std::vector<double>& values);

struct HighLossResult {
  std::size_t h_count = 0;
  std::optional<double> mean_l1;  // mean over h of CE(pgd) - CE(baseline)
  std::size_t sdm_fail_count = 0;
  std::optional<double> mean_l2;  // mean over h of CE(sdm) - CE(baseline)
  std::vector<std::size_t> h;
};

/// h = examples where PGD fails and the baseline succeeds.
HighLossResult high_loss_analysis(const MlpModel& model, const Tensor& advs_pgd,
                                  const Tensor& advs_sdm, const Tensor& advs_baseline,
                                  std::span<const std::uint32_t> labels);

}  // namespace sdm
