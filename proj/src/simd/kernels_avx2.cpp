#include "sdm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <algorithm>

#define SDM_AVX2 __attribute__((target("avx2,fma")))

namespace sdm::simd {

namespace {

SDM_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

SDM_AVX2 void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // mul + add rather than fmadd keeps results identical to the scalar kernel.
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

SDM_AVX2 void clamp_avx2(const double* x, double lo, double hi, double* out, std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // min/max operand order mirrors std::max(lo, std::min(x, hi)) for NaN-free input.
    const __m256d v = _mm256_min_pd(_mm256_loadu_pd(x + i), vhi);
    _mm256_storeu_pd(out + i, _mm256_max_pd(v, vlo));
  }
  for (; i < n; ++i) out[i] = std::max(lo, std::min(x[i], hi));
}

SDM_AVX2 void linf_step_avx2(const double* nat, const double* prev, const double* grad,
                             double alpha, double eps, bool clamp01, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d neg_one = _mm256_set1_pd(-1.0);
  const __m256d valpha = _mm256_set1_pd(alpha);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vneg_eps = _mm256_set1_pd(-eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d pos = _mm256_and_pd(_mm256_cmp_pd(g, zero, _CMP_GT_OQ), one);
    const __m256d neg = _mm256_and_pd(_mm256_cmp_pd(g, zero, _CMP_LT_OQ), neg_one);
    const __m256d s = _mm256_or_pd(pos, neg);
    const __m256d nv = _mm256_loadu_pd(nat + i);
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prev + i), nv);
    d = _mm256_add_pd(d, _mm256_mul_pd(valpha, s));
    d = _mm256_max_pd(_mm256_min_pd(d, veps), vneg_eps);
    __m256d x = _mm256_add_pd(nv, d);
    if (clamp01) x = _mm256_max_pd(_mm256_min_pd(x, one), zero);
    _mm256_storeu_pd(out + i, x);
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

SDM_AVX2 void relu_avx2(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    // Keep -0.0 and 0.0 inputs mapping to +0.0 as in the scalar kernel.
    _mm256_storeu_pd(out + i, _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ)));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, clamp_avx2, linf_step_avx2,
                                 relu_avx2};
  return &table;
}

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace sdm::simd

#else

namespace sdm::simd {
const KernelTable* avx2_kernels() { return nullptr; }
bool cpu_has_avx2() { return false; }
}  // namespace sdm::simd

#endif
