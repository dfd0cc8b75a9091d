#include "sdm/train.hpp"

#include <cmath>
#include <numeric>

#include "sdm/attacks.hpp"
#include "sdm/error.hpp"
#include "sdm/losses.hpp"
#include "sdm/probability.hpp"
#include "sdm/rng.hpp"

namespace sdm {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (adversarial) {
    const auto& a = *adversarial;
    if (!(a.epsilon > 0.0 && a.epsilon <= 0.5)) throw ConfigError("adversarial eps must be in (0, 0.5]");
    if (!(a.alpha > 0.0)) throw ConfigError("adversarial alpha must be > 0");
    if (a.steps == 0) throw ConfigError("adversarial steps must be >= 1");
  }
}

double accuracy(const MlpModel& model, const DatasetSplit& data) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (argmax(model.forward(data.inputs.row(i))) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

// l-inf PGD on CE with a uniform random start, as used to build training batches.
Vec adversarial_example(const MlpModel& model, std::span<const double> x, std::size_t y,
                        const AdvTrainConfig& adv, std::uint64_t seed, std::uint64_t stream) {
  Vec cur = random_start_point(x, Norm::linf, adv.epsilon, true, seed, stream);
  ForwardTrace trace;
  for (std::size_t t = 0; t < adv.steps; ++t) {
    const Vec logits = model.forward(cur, trace);
    const Vec grad = model.backward_input(trace, loss_grad_wrt_scores(LossKind::ce(), logits, y));
    cur = step_linf(x, cur, grad, adv.alpha, adv.epsilon, true);
  }
  return cur;
}

}  // namespace

TrainResult train(MlpModel model, const DatasetSplit& data, const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.dim() != model.input_dim()) {
    throw ConfigError("dataset dim " + std::to_string(data.dim()) + " vs model input " +
                      std::to_string(model.input_dim()));
  }
  if (data.num_classes != model.num_classes()) {
    throw ConfigError("dataset has K=" + std::to_string(data.num_classes) + " but model has K=" +
                      std::to_string(model.num_classes()));
  }

  TrainResult result;
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SeededRng shuffle_rng(cfg.seed, 0);
  // Adversarial starts use streams above the shuffle stream, one per (epoch, example).
  std::uint64_t adv_stream = 1;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    }
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      ParamGrads grads = model.zero_grads();
      ForwardTrace trace;
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const std::size_t y = data.labels[idx];
        Vec x(data.inputs.row(idx).begin(), data.inputs.row(idx).end());
        if (cfg.adversarial) {
          x = adversarial_example(model, x, y, *cfg.adversarial, cfg.seed, adv_stream++);
        }
        const Vec logits = model.forward(x, trace);
        const double loss = ce_loss(logits, y);
        if (!std::isfinite(loss)) {
          throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(start / cfg.batch_size));
        }
        loss_sum += loss;
        model.accumulate_param_grads(trace, loss_grad_wrt_scores(LossKind::ce(), logits, y), grads);
      }
      const double scale = cfg.learning_rate / static_cast<double>(end - start);
      for (std::size_t l = 0; l < model.num_layers(); ++l) {
        auto w = model.weight(l).values();
        const auto gw = grads.weights[l].values();
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= scale * gw[j];
        auto& b = model.bias(l);
        for (std::size_t j = 0; j < b.size(); ++j) b[j] -= scale * grads.biases[l][j];
      }
    }
    result.trace.push_back({loss_sum / static_cast<double>(n), accuracy(model, data)});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace sdm
