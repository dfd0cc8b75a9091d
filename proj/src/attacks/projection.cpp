#include <algorithm>
#include <cmath>

#include "sdm/attacks.hpp"
#include "sdm/error.hpp"
#include "sdm/kernels.hpp"

namespace sdm {

namespace {

void check_same(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw ContractError("projection step: shape mismatch");
}

}  // namespace

Vec project_linf(std::span<const double> delta, double epsilon) {
  if (!(epsilon >= 0.0)) throw ContractError("project_linf: negative epsilon");
  Vec out(delta.size());
  simd::active().clamp(delta.data(), -epsilon, epsilon, out.data(), delta.size());
  return out;
}

Vec step_linf(std::span<const double> x_nat, std::span<const double> x_prev,
              std::span<const double> grad, double alpha, double epsilon, bool clamp01) {
  check_same(x_nat.size(), x_prev.size(), grad.size());
  if (!(epsilon >= 0.0)) throw ContractError("step_linf: negative epsilon");
  Vec out(x_nat.size());
  simd::active().linf_step(x_nat.data(), x_prev.data(), grad.data(), alpha, epsilon, clamp01,
                           out.data(), out.size());
  return out;
}

Vec normalize_grad_l2(std::span<const double> grad, double zeta) {
  if (!(zeta > 0.0)) throw ContractError("normalize_grad_l2: zeta must be positive");
  const double scale = 1.0 / (norm_l2(grad) + zeta);
  Vec out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = grad[i] * scale;
  return out;
}

Vec step_l2(std::span<const double> x_nat, std::span<const double> x_prev,
            std::span<const double> grad, double alpha, double epsilon, L2StepMode mode,
            double zeta, bool clamp01) {
  check_same(x_nat.size(), x_prev.size(), grad.size());
  if (!(epsilon >= 0.0)) throw ContractError("step_l2: negative epsilon");
  Vec dir = normalize_grad_l2(grad, zeta);
  if (mode == L2StepMode::paper_literal) {
    for (double& v : dir) v = sign(v);
  }
  Vec delta(x_nat.size());
  for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = x_prev[i] + alpha * dir[i] - x_nat[i];
  const double len = norm_l2(delta);
  if (len > epsilon) {
    const double scale = epsilon / len;
    for (double& v : delta) v *= scale;
  }
  Vec out(x_nat.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x_nat[i] + delta[i];
    if (clamp01) out[i] = std::clamp(out[i], 0.0, 1.0);
  }
  return out;
}

}  // namespace sdm
