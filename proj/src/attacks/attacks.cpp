#include <cmath>
#include <functional>

#include "sdm/attacks.hpp"
#include "sdm/error.hpp"
#include "sdm/parallel.hpp"
#include "sdm/probability.hpp"
#include "sdm/rng.hpp"

namespace sdm {

std::vector<bool> AttackOutcome::success() const { return report.success_mask(); }

Vec random_start_point(std::span<const double> x_nat, Norm norm, double epsilon, bool clamp01,
                       std::uint64_t seed, std::uint64_t index) {
  SeededRng rng(seed, index);
  Vec x(x_nat.begin(), x_nat.end());
  if (norm == Norm::linf) {
    for (double& v : x) v += rng.uniform(-epsilon, epsilon);
  } else {
    Vec dir(x.size());
    for (double& v : dir) v = rng.normal();
    const double len = norm_l2(dir);
    const double radius = rng.uniform(0.0, epsilon);
    if (len > 0.0) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += dir[i] * (radius / len);
    }
  }
  if (clamp01) {
    for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  }
  return x;
}

namespace {

// Runs one gradient step of `loss` for every example: parallel forward,
// deterministic phi fold (DPDR only), parallel backward + projection.
class StepEngine {
 public:
  StepEngine(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg)
      : model_(model), batch_(batch), cfg_(cfg), current_(batch.inputs),
        steps_per_example_(batch.size(), 0) {}

  Tensor& current() { return current_; }

  void step(const LossKind& loss) {
    const std::size_t n = batch_.size();
    std::vector<ForwardTrace> traces(n);
    std::vector<Vec> logits(n);
    parallel_for(n, [&](std::size_t i) { logits[i] = model_.forward(current_.row(i), traces[i]); });

    DpdrContext ctx{cfg_.zeta, 0.0};
    if (loss.kind == LossKind::Kind::dpdr) {
      std::vector<ProbVector> probs;
      probs.reserve(n);
      for (const auto& s : logits) probs.push_back(softmax(s));
      ctx.phi = dpdr_phi(probs, batch_.labels, loss.stage);
    }

    Tensor next = current_;
    parallel_for(n, [&](std::size_t i) {
      const std::size_t y = batch_.labels[i];
      if (cfg_.early_stop && argmax(logits[i]) != y) return;
      const Vec dl_ds = loss_grad_wrt_scores(loss, logits[i], y, ctx, &ties_);
      const Vec grad = model_.backward_input(traces[i], dl_ds);
      ++steps_per_example_[i];
      const auto nat = batch_.inputs.row(i);
      const auto prev = current_.row(i);
      const Vec x = cfg_.norm == Norm::linf
                        ? step_linf(nat, prev, grad, cfg_.alpha, cfg_.epsilon, cfg_.clamp01)
                        : step_l2(nat, prev, grad, cfg_.alpha, cfg_.epsilon, cfg_.l2_step_mode,
                                  cfg_.zeta, cfg_.clamp01);
      std::copy(x.begin(), x.end(), next.row(i).begin());
    });
    current_ = std::move(next);
    ++steps_;
  }

  AttackOutcome finish(std::vector<StepRecord> trace) {
    AttackOutcome out;
    out.report = evaluate(model_, current_, batch_.labels, &batch_.inputs);
    out.adversarial = std::move(current_);
    out.gradient_steps = steps_;
    out.steps_per_example = steps_per_example_;
    out.trace = std::move(trace);
    out.tie_advisories = ties_.count.load();
    return out;
  }

 private:
  const MlpModel& model_;
  const DatasetSplit& batch_;
  const AttackConfig& cfg_;
  Tensor current_;
  std::vector<std::size_t> steps_per_example_;
  std::size_t steps_ = 0;
  TieCounter ties_;
};

void check_batch(const MlpModel& model, const DatasetSplit& batch) {
  if (batch.size() == 0) throw ContractError("attack batch is empty");
  if (batch.dim() != model.input_dim()) {
    throw ContractError("batch dim " + std::to_string(batch.dim()) + " vs model input " +
                        std::to_string(model.input_dim()));
  }
  for (auto y : batch.labels) {
    if (y >= model.num_classes()) throw ContractError("batch label outside model class range");
  }
}

AttackOutcome iterate_single_loss(const MlpModel& model, const DatasetSplit& batch,
                                  const AttackConfig& cfg, const LossKind& loss) {
  check_batch(model, batch);
  cfg.validate(model.num_classes());
  StepEngine engine(model, batch, cfg);
  if (cfg.uses_random_start()) {
    parallel_for(batch.size(), [&](std::size_t i) {
      const Vec x0 = random_start_point(batch.inputs.row(i), cfg.norm, cfg.epsilon, cfg.clamp01,
                                        cfg.seed, i);
      std::copy(x0.begin(), x0.end(), engine.current().row(i).begin());
    });
  }
  std::vector<StepRecord> trace;
  for (std::size_t t = 0; t < cfg.total_steps; ++t) {
    engine.step(loss);
    if (cfg.record_trace) trace.push_back({1, 1, t + 1, loss});
  }
  return engine.finish(std::move(trace));
}

}  // namespace

AttackOutcome fgsm(const MlpModel& model, const DatasetSplit& batch, double epsilon, bool clamp01) {
  AttackConfig cfg;
  cfg.method = AttackMethod::fgsm;
  cfg.norm = Norm::linf;
  cfg.epsilon = epsilon;
  cfg.alpha = epsilon;
  cfg.total_steps = 1;
  cfg.random_start = false;
  cfg.clamp01 = clamp01;
  return iterate_single_loss(model, batch, cfg, LossKind::ce());
}

AttackOutcome pgd(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg) {
  return iterate_single_loss(model, batch, cfg, LossKind::ce());
}

AttackOutcome margin_pgd(const MlpModel& model, const DatasetSplit& batch,
                         const AttackConfig& cfg) {
  return iterate_single_loss(model, batch, cfg, LossKind::margin());
}

AttackOutcome sdm_attack(const MlpModel& model, const DatasetSplit& batch, const AttackConfig& cfg) {
  check_batch(model, batch);
  cfg.validate(model.num_classes());
  const Schedule schedule = cfg.resolved_schedule(model.num_classes());

  StepEngine engine(model, batch, cfg);
  if (cfg.random_start.value_or(false)) {
    parallel_for(batch.size(), [&](std::size_t i) {
      const Vec x0 = random_start_point(batch.inputs.row(i), cfg.norm, cfg.epsilon, cfg.clamp01,
                                        cfg.seed, i);
      std::copy(x0.begin(), x0.end(), engine.current().row(i).begin());
    });
  }

  // Each stage continues from the previous stage's final iterate; tau, the
  // descending sort and phi are recomputed from live probabilities every step.
  std::vector<StepRecord> trace;
  for (std::size_t c = 1; c <= schedule.cycles; ++c) {
    for (std::size_t n = 1; n <= schedule.stages; ++n) {
      const LossKind loss = n == 1 ? LossKind::nprob() : LossKind::dpdr(n);
      for (std::size_t t = 1; t <= schedule.steps; ++t) {
        engine.step(loss);
        if (cfg.record_trace) trace.push_back({c, n, t, loss});
      }
    }
  }
  return engine.finish(std::move(trace));
}

AttackOutcome run_attack(const MlpModel& model, const DatasetSplit& batch,
                         const AttackConfig& cfg) {
  switch (cfg.method) {
    case AttackMethod::fgsm:
      if (cfg.norm != Norm::linf) throw ConfigError("fgsm supports only the linf norm");
      return fgsm(model, batch, cfg.epsilon, cfg.clamp01);
    case AttackMethod::pgd:
      return pgd(model, batch, cfg);
    case AttackMethod::margin_pgd:
      return margin_pgd(model, batch, cfg);
    case AttackMethod::sdm:
      return sdm_attack(model, batch, cfg);
  }
  throw ConfigError("unknown attack method");
}

}  // namespace sdm
