#include "sdm/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <algorithm>

namespace sdm::simd {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void clamp_neon(const double* x, double lo, double hi, double* out, std::size_t n) {
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vhi = vdupq_n_f64(hi);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmaxq_f64(vminq_f64(vld1q_f64(x + i), vhi), vlo));
  }
  for (; i < n; ++i) out[i] = std::max(lo, std::min(x[i], hi));
}

void linf_step_neon(const double* nat, const double* prev, const double* grad, double alpha,
                    double eps, bool clamp01, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t veps = vdupq_n_f64(eps);
  const float64x2_t vneg_eps = vdupq_n_f64(-eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const uint64x2_t gt = vcgtq_f64(g, zero);
    const uint64x2_t lt = vcltq_f64(g, zero);
    const float64x2_t s = vbslq_f64(gt, one, vbslq_f64(lt, vdupq_n_f64(-1.0), zero));
    const float64x2_t nv = vld1q_f64(nat + i);
    float64x2_t d = vsubq_f64(vld1q_f64(prev + i), nv);
    d = vaddq_f64(d, vmulq_f64(vdupq_n_f64(alpha), s));
    d = vmaxq_f64(vminq_f64(d, veps), vneg_eps);
    float64x2_t x = vaddq_f64(nv, d);
    if (clamp01) x = vmaxq_f64(vminq_f64(x, one), zero);
    vst1q_f64(out + i, x);
  }
  for (; i < n; ++i) {
    const double s = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
    double d = (prev[i] - nat[i]) + alpha * s;
    d = std::max(-eps, std::min(d, eps));
    double x = nat[i] + d;
    if (clamp01) x = std::max(0.0, std::min(x, 1.0));
    out[i] = x;
  }
}

void relu_neon(const double* x, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(v, zero), v, zero));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{"neon", dot_neon, axpy_neon, clamp_neon, linf_step_neon,
                                 relu_neon};
  return &table;
}

}  // namespace sdm::simd

#else

namespace sdm::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace sdm::simd

#endif
