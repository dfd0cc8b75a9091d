#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdm/tensor.hpp"

namespace sdm {

/// n x d inputs in [0,1] with zero-based labels in [0, K).
struct DatasetSplit {
  Tensor inputs;
  std::vector<std::uint32_t> labels;
  std::size_t num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return inputs.cols(); }

  /// Throws ContractError unless shapes agree, labels < K, inputs finite and
  /// (when `unit_range`) inside [0,1].
  void validate(bool unit_range = true) const;

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

enum class SynthKind { blobs, rings };

struct SynthSpec {
  SynthKind kind = SynthKind::blobs;
  std::size_t n = 600;
  std::size_t d = 8;
  std::size_t k = 3;
  double spread = 0.05;
  std::uint64_t seed = 0;
};

/// Class-balanced synthetic data (label i % K for sample i), clamped into [0,1]^d.
DatasetSplit synth_dataset(const SynthSpec& spec);

/// Rows [begin, end) as a new split.
DatasetSplit slice(const DatasetSplit& data, std::size_t begin, std::size_t end);

}  // namespace sdm
