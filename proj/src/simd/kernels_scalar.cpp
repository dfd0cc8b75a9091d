#include <algorithm>

#include "sdm/kernels.hpp"

namespace sdm::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void clamp_scalar(const double* x, double lo, double hi, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(lo, std::min(x[i], hi));
}

void linf_step_scalar(const double* nat, const double* prev, const double* grad, double alpha,
                      double eps, bool clamp01, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
    double d = (prev[i] - nat[i]) + alpha * s;
    d = std::max(-eps, std::min(d, eps));
    double x = nat[i] + d;
    if (clamp01) x = std::max(0.0, std::min(x, 1.0));
    out[i] = x;
  }
}

void relu_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, clamp_scalar, linf_step_scalar,
                                 relu_scalar};
  return table;
}

}  // namespace sdm::simd
