#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdm/dataset.hpp"
#include "sdm/mlp.hpp"

namespace sdm {

/// PGD adversarial training block (l-inf, random start).
struct AdvTrainConfig {
  double epsilon = 0.1;
  double alpha = 0.025;
  std::size_t steps = 10;
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  std::optional<AdvTrainConfig> adversarial;

  void validate() const;
};

struct EpochStats {
  double loss = 0.0;      // mean CE on the (possibly perturbed) training batches
  double accuracy = 0.0;  // clean accuracy on the whole split after the epoch
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochStats> trace;
};

/// Minibatch SGD on cross-entropy. Single-threaded; deterministic in cfg.seed.
TrainResult train(MlpModel model, const DatasetSplit& data, const TrainConfig& cfg);

double accuracy(const MlpModel& model, const DatasetSplit& data);

}  // namespace sdm
