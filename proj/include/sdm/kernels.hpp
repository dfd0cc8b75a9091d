#pragma once

#include <cstddef>
#include <string_view>

namespace sdm::simd {

// Inner-loop kernels with one scalar reference implementation and one
// vectorized variant per ISA. Elementwise kernels are bit-identical across
// variants; reductions (dot) differ only in summation order.
struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out = max(lo, min(x, hi))
  void (*clamp)(const double* x, double lo, double hi, double* out, std::size_t n);
  // out = nat + clamp(prev - nat + alpha * sign(grad), -eps, eps), then [0,1] when clamp01
  void (*linf_step)(const double* nat, const double* prev, const double* grad, double alpha,
                    double eps, bool clamp01, double* out, std::size_t n);
  // out = max(x, 0)
  void (*relu)(const double* x, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();
// Null when the ISA is not compiled in for this target.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

bool cpu_has_avx2();

/// Table selected once per process: SDM_SIMD=scalar|avx2|neon overrides,
/// otherwise the widest variant the CPU supports.
const KernelTable& active();

/// Selects a table by name for the rest of the process; throws ContractError
/// for unknown or unsupported names.
void select(std::string_view name);

}  // namespace sdm::simd
