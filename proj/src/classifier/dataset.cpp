#include "sdm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdm/error.hpp"
#include "sdm/rng.hpp"

namespace sdm {

void DatasetSplit::validate(bool unit_range) const {
  if (labels.empty()) throw ContractError("dataset is empty");
  if (inputs.rank() != 2 || inputs.rows() != labels.size()) {
    throw ContractError("dataset inputs " + shape_string(inputs.shape()) + " vs " +
                        std::to_string(labels.size()) + " labels");
  }
  if (num_classes < 2) throw ContractError("dataset needs at least two classes");
  for (auto y : labels) {
    if (y >= num_classes) {
      throw ContractError("label " + std::to_string(y) + " out of range for K=" +
                          std::to_string(num_classes));
    }
  }
  inputs.require_finite("dataset inputs");
  if (!unit_range) return;
  for (double v : inputs.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw ContractError("dataset inputs must lie in [0,1]");
  }
}

DatasetSplit synth_dataset(const SynthSpec& spec) {
  if (spec.k < 2 || spec.n < spec.k) throw ContractError("synth_dataset: need n >= K >= 2");
  if (spec.d < 2) throw ContractError("synth_dataset: need d >= 2");
  if (!(spec.spread >= 0.0)) throw ContractError("synth_dataset: spread must be >= 0");

  SeededRng center_rng(spec.seed, 0);
  SeededRng sample_rng(spec.seed, 1);

  DatasetSplit out;
  out.num_classes = spec.k;
  out.inputs = Tensor::matrix(spec.n, spec.d);
  out.labels.resize(spec.n);

  std::vector<Vec> centers(spec.k, Vec(spec.d));
  std::vector<Vec> axes;
  if (spec.kind == SynthKind::blobs) {
    for (auto& c : centers) {
      for (double& v : c) v = center_rng.uniform(0.2, 0.8);
    }
  }

  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto y = static_cast<std::uint32_t>(i % spec.k);
    out.labels[i] = y;
    auto row = out.inputs.row(i);
    if (spec.kind == SynthKind::blobs) {
      for (std::size_t j = 0; j < spec.d; ++j) {
        row[j] = centers[y][j] + spec.spread * sample_rng.normal();
      }
    } else {
      // Concentric rings in the first two coordinates; the rest is noise around 0.5.
      const double radius = 0.45 * static_cast<double>(y + 1) / static_cast<double>(spec.k);
      const double angle = sample_rng.uniform(0.0, 2.0 * std::numbers::pi);
      row[0] = 0.5 + radius * std::cos(angle) + spec.spread * sample_rng.normal();
      row[1] = 0.5 + radius * std::sin(angle) + spec.spread * sample_rng.normal();
      for (std::size_t j = 2; j < spec.d; ++j) row[j] = 0.5 + spec.spread * sample_rng.normal();
    }
    for (double& v : row) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

DatasetSplit slice(const DatasetSplit& data, std::size_t begin, std::size_t end) {
  if (begin >= end || end > data.size()) throw ContractError("slice: bad row range");
  DatasetSplit out;
  out.num_classes = data.num_classes;
  const auto d = data.dim();
  Vec values(data.inputs.data().begin() + static_cast<std::ptrdiff_t>(begin * d),
             data.inputs.data().begin() + static_cast<std::ptrdiff_t>(end * d));
  out.inputs = Tensor({end - begin, d}, std::move(values));
  out.labels.assign(data.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                    data.labels.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace sdm
