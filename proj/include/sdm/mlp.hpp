#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sdm/tensor.hpp"

namespace sdm {

/// Per-example activations kept by a forward pass for the backward pass.
struct ForwardTrace {
  std::vector<Vec> inputs;  // inputs[l] feeds layer l; inputs[0] is x
  std::vector<Vec> pre;     // pre-activation of each layer
};

/// Parameter gradients with the same layout as the model.
struct ParamGrads {
  std::vector<Tensor> weights;
  std::vector<Vec> biases;
};

/// Feed-forward ReLU classifier emitting raw logits. Layer l maps
/// dims[l] -> dims[l+1]; ReLU after every layer except the last.
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(std::vector<std::size_t> dims, std::vector<Tensor> weights, std::vector<Vec> biases);

  /// He-uniform weights and zero biases drawn from (seed, stream 0).
  static MlpModel random(std::vector<std::size_t> dims, std::uint64_t seed);
  static MlpModel zeros(std::vector<std::size_t> dims);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_dim() const { return dims_.front(); }
  std::size_t num_classes() const { return dims_.back(); }
  std::size_t num_layers() const { return weights_.size(); }

  const Tensor& weight(std::size_t layer) const { return weights_[layer]; }
  const Vec& bias(std::size_t layer) const { return biases_[layer]; }
  Tensor& weight(std::size_t layer) { return weights_[layer]; }
  Vec& bias(std::size_t layer) { return biases_[layer]; }

  Vec forward(std::span<const double> x) const;
  Vec forward(std::span<const double> x, ForwardTrace& trace) const;

  /// dL/dx given dL/dS, reusing the activations of `trace`. ReLU'(0) = 0.
  Vec backward_input(const ForwardTrace& trace, std::span<const double> dl_dscores) const;

  /// Accumulates dL/dtheta into `grads` (which must be shaped like the model).
  void accumulate_param_grads(const ForwardTrace& trace, std::span<const double> dl_dscores,
                              ParamGrads& grads) const;
  ParamGrads zero_grads() const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  void check_input(std::size_t n) const;

  std::vector<std::size_t> dims_;
  std::vector<Tensor> weights_;  // [out x in]
  std::vector<Vec> biases_;
};

Vec input_gradient(const MlpModel& model, std::span<const double> x,
                   std::span<const double> dl_dscores);

using ScalarLoss = std::function<double(std::span<const double>)>;

/// Central differences (L(x+h e_i) - L(x-h e_i)) / 2h per coordinate.
Vec finite_diff_input_gradient(std::span<const double> x, const ScalarLoss& loss, double step);

/// Smallest |pre-activation| over hidden layers; used to keep gradient checks
/// away from ReLU kinks.
double min_hidden_preactivation_margin(const MlpModel& model, std::span<const double> x);

}  // namespace sdm
