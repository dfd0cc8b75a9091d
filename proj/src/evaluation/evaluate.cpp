#include "sdm/evaluation.hpp"

#include "sdm/error.hpp"
#include "sdm/linalg.hpp"
#include "sdm/parallel.hpp"
#include "sdm/probability.hpp"

namespace sdm {

std::vector<bool> EvalReport::success_mask() const {
  std::vector<bool> mask;
  mask.reserve(records.size());
  for (const auto& r : records) mask.push_back(r.success);
  return mask;
}

std::vector<double> EvalReport::ce_losses() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.ce_loss);
  return out;
}

EvalReport evaluate(const MlpModel& model, const Tensor& inputs,
                    std::span<const std::uint32_t> labels, const Tensor* naturals) {
  if (inputs.rank() != 2 || inputs.rows() != labels.size() || inputs.cols() != model.input_dim()) {
    throw ContractError("evaluate: inputs " + shape_string(inputs.shape()) + " vs " +
                        std::to_string(labels.size()) + " labels and model input " +
                        std::to_string(model.input_dim()));
  }
  if (naturals != nullptr && naturals->shape() != inputs.shape()) {
    throw ContractError("evaluate: naturals shape differs from inputs");
  }
  EvalReport report;
  report.records.resize(labels.size());
  parallel_for(labels.size(), [&](std::size_t i) {
    const std::size_t y = labels[i];
    if (y >= model.num_classes()) throw ContractError("evaluate: label out of range");
    const Vec logits = model.forward(inputs.row(i));
    const auto p = softmax(logits);
    auto& r = report.records[i];
    r.index = i;
    r.success = argmax(logits) != y;
    r.ce_loss = ce_loss(logits, y);
    r.p_y = p[y];
    r.p_tau = p[argmax_excluding(p.values(), y)];
    if (naturals != nullptr) {
      const Vec delta = subtract(inputs.row(i), naturals->row(i));
      r.linf_norm = norm_linf(delta);
      r.l2_norm = norm_l2(delta);
    }
  });
  std::size_t successes = 0;
  double ce_sum = 0.0;
  for (const auto& r : report.records) {
    successes += r.success ? 1 : 0;
    ce_sum += r.ce_loss;
  }
  const auto n = static_cast<double>(labels.size());
  report.attack_success_rate = labels.empty() ? 0.0 : static_cast<double>(successes) / n;
  report.mean_ce_loss = labels.empty() ? 0.0 : ce_sum / n;
  return report;
}

const PairComparison& SetComparison::pair(const std::string& a, const std::string& b) const {
  for (const auto& p : pairs) {
    if (p.a == a && p.b == b) return p;
  }
  throw ContractError("no comparison for pair " + a + "/" + b);
}

SetComparison success_set_analysis(const std::vector<std::string>& methods,
                                   const std::vector<std::vector<bool>>& masks) {
  if (methods.size() != masks.size()) throw ContractError("method names and masks differ in count");
  SetComparison out;
  out.methods = methods;
  out.masks = masks;
  out.n = masks.empty() ? 0 : masks.front().size();
  for (const auto& m : masks) {
    if (m.size() != out.n) throw ContractError("success masks differ in length");
  }
  const double denom = out.n == 0 ? 1.0 : static_cast<double>(out.n);
  for (std::size_t a = 0; a < masks.size(); ++a) {
    for (std::size_t b = a + 1; b < masks.size(); ++b) {
      PairComparison p;
      p.a = methods[a];
      p.b = methods[b];
      for (std::size_t i = 0; i < out.n; ++i) {
        const bool in_a = masks[a][i];
        const bool in_b = masks[b][i];
        p.count_intersection += (in_a && in_b) ? 1 : 0;
        p.count_a_minus_b += (in_a && !in_b) ? 1 : 0;
        p.count_b_minus_a += (!in_a && in_b) ? 1 : 0;
      }
      p.intersection = static_cast<double>(p.count_intersection) / denom;
      p.a_minus_b = static_cast<double>(p.count_a_minus_b) / denom;
      p.b_minus_a = static_cast<double>(p.count_b_minus_a) / denom;
      out.pairs.push_back(p);
    }
  }
  return out;
}

std::optional<double> mean_over_difference(const std::vector<bool>& a, const std::vector<bool>& b,
                                           const std::vector<double>& values) {
  if (a.size() != b.size() || a.size() != values.size()) {
    throw ContractError("mean_over_difference: length mismatch");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) {
      sum += values[i];
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

HighLossResult high_loss_analysis(const MlpModel& model, const Tensor& advs_pgd,
                                  const Tensor& advs_sdm, const Tensor& advs_baseline,
                                  std::span<const std::uint32_t> labels) {
  if (advs_pgd.shape() != advs_sdm.shape() || advs_pgd.shape() != advs_baseline.shape()) {
    throw ContractError("high_loss_analysis: adversarial sets are not aligned");
  }
  const auto pgd = evaluate(model, advs_pgd, labels);
  const auto sdm = evaluate(model, advs_sdm, labels);
  const auto base = evaluate(model, advs_baseline, labels);

  HighLossResult out;
  double l1 = 0.0;
  double l2 = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (pgd.records[i].success || !base.records[i].success) continue;
    out.h.push_back(i);
    l1 += pgd.records[i].ce_loss - base.records[i].ce_loss;
    l2 += sdm.records[i].ce_loss - base.records[i].ce_loss;
    if (!sdm.records[i].success) ++out.sdm_fail_count;
  }
  out.h_count = out.h.size();
  if (out.h_count > 0) {
    out.mean_l1 = l1 / static_cast<double>(out.h_count);
    out.mean_l2 = l2 / static_cast<double>(out.h_count);
  }
  return out;
}

}  // namespace sdm
