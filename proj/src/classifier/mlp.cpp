#include "sdm/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdm/error.hpp"
#include "sdm/kernels.hpp"
#include "sdm/linalg.hpp"
#include "sdm/rng.hpp"

namespace sdm {

MlpModel::MlpModel(std::vector<std::size_t> dims, std::vector<Tensor> weights,
                   std::vector<Vec> biases)
    : dims_(std::move(dims)), weights_(std::move(weights)), biases_(std::move(biases)) {
  if (dims_.size() < 2) throw ContractError("model needs at least one layer");
  if (dims_.back() < 3) throw ContractError("model needs at least 3 classes");
  const std::size_t layers = dims_.size() - 1;
  if (weights_.size() != layers || biases_.size() != layers) {
    throw ContractError("model parameter count does not match layer dims");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (weights_[l].shape() != std::vector<std::size_t>{dims_[l + 1], dims_[l]}) {
      throw ContractError("layer " + std::to_string(l) + " weight shape " +
                          shape_string(weights_[l].shape()) + " incompatible with dims");
    }
    if (biases_[l].size() != dims_[l + 1]) {
      throw ContractError("layer " + std::to_string(l) + " bias length mismatch");
    }
    weights_[l].require_finite("model weights");
    if (!all_finite(biases_[l])) throw NumericError("model biases contain non-finite values");
  }
}

MlpModel MlpModel::zeros(std::vector<std::size_t> dims) {
  std::vector<Tensor> w;
  std::vector<Vec> b;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    w.push_back(Tensor::matrix(dims[l + 1], dims[l]));
    b.emplace_back(dims[l + 1], 0.0);
  }
  return MlpModel(std::move(dims), std::move(w), std::move(b));
}

MlpModel MlpModel::random(std::vector<std::size_t> dims, std::uint64_t seed) {
  MlpModel m = zeros(dims);
  SeededRng rng(seed, 0);
  for (auto& w : m.weights_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.cols()));
    for (double& v : w.values()) v = rng.uniform(-bound, bound);
  }
  return m;
}

void MlpModel::check_input(std::size_t n) const {
  if (n != input_dim()) {
    throw ContractError("model expects input of length " + std::to_string(input_dim()) +
                        ", got " + std::to_string(n));
  }
}

Vec MlpModel::forward(std::span<const double> x) const {
  check_input(x.size());
  const auto& k = simd::active();
  Vec h(x.begin(), x.end());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vec z = matvec(weights_[l], h);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += biases_[l][i];
    if (l + 1 < weights_.size()) k.relu(z.data(), z.data(), z.size());
    h = std::move(z);
  }
  return h;
}

Vec MlpModel::forward(std::span<const double> x, ForwardTrace& trace) const {
  check_input(x.size());
  const auto& k = simd::active();
  trace.inputs.resize(weights_.size());
  trace.pre.resize(weights_.size());
  trace.inputs[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vec z = matvec(weights_[l], trace.inputs[l]);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += biases_[l][i];
    trace.pre[l] = z;
    if (l + 1 < weights_.size()) {
      auto& next = trace.inputs[l + 1];
      next.resize(z.size());
      k.relu(z.data(), next.data(), z.size());
    } else {
      return z;
    }
  }
  return {};
}

Vec MlpModel::backward_input(const ForwardTrace& trace, std::span<const double> dl_dscores) const {
  if (dl_dscores.size() != num_classes()) {
    throw ContractError("dL/dS length " + std::to_string(dl_dscores.size()) + " vs K " +
                        std::to_string(num_classes()));
  }
  Vec g(dl_dscores.begin(), dl_dscores.end());
  for (std::size_t l = weights_.size(); l-- > 0;) {
    if (l + 1 < weights_.size()) {
      const auto& z = trace.pre[l];
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(z[i] > 0.0)) g[i] = 0.0;
      }
    }
    g = matvec_transposed(weights_[l], g);
  }
  return g;
}

ParamGrads MlpModel::zero_grads() const {
  ParamGrads g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.emplace_back(weights_[l].shape(), 0.0);
    g.biases.emplace_back(biases_[l].size(), 0.0);
  }
  return g;
}

void MlpModel::accumulate_param_grads(const ForwardTrace& trace,
                                      std::span<const double> dl_dscores,
                                      ParamGrads& grads) const {
  const auto& k = simd::active();
  Vec g(dl_dscores.begin(), dl_dscores.end());
  for (std::size_t l = weights_.size(); l-- > 0;) {
    if (l + 1 < weights_.size()) {
      const auto& z = trace.pre[l];
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(z[i] > 0.0)) g[i] = 0.0;
      }
    }
    const auto& in = trace.inputs[l];
    for (std::size_t i = 0; i < g.size(); ++i) {
      grads.biases[l][i] += g[i];
      if (g[i] != 0.0) k.axpy(g[i], in.data(), grads.weights[l].row(i).data(), in.size());
    }
    if (l > 0) g = matvec_transposed(weights_[l], g);
  }
}

Vec input_gradient(const MlpModel& model, std::span<const double> x,
                   std::span<const double> dl_dscores) {
  if (!all_finite(dl_dscores)) throw ContractError("dL/dS must be finite");
  ForwardTrace trace;
  model.forward(x, trace);
  return model.backward_input(trace, dl_dscores);
}

Vec finite_diff_input_gradient(std::span<const double> x, const ScalarLoss& loss, double step) {
  if (!(step > 0.0)) throw ContractError("finite-difference step must be positive");
  Vec probe(x.begin(), x.end());
  Vec grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = loss(probe);
    probe[i] = x[i] - step;
    const double down = loss(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("loss evaluation not finite at coordinate " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double min_hidden_preactivation_margin(const MlpModel& model, std::span<const double> x) {
  ForwardTrace trace;
  model.forward(x, trace);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < model.num_layers(); ++l) {
    for (double z : trace.pre[l]) m = std::min(m, std::abs(z));
  }
  return m;
}

}  // namespace sdm
