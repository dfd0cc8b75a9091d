#include <atomic>
#include <cstdlib>
#include <string>

#include "sdm/error.hpp"
#include "sdm/kernels.hpp"

namespace sdm::simd {

namespace {

const KernelTable* by_name(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return cpu_has_avx2() ? avx2_kernels() : nullptr;
  if (name == "neon") return neon_kernels();
  return nullptr;
}

const KernelTable* detect() {
  if (const char* env = std::getenv("SDM_SIMD")) {
    if (const auto* t = by_name(env)) return t;
  }
  if (const auto* t = neon_kernels()) return t;
  if (cpu_has_avx2()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(std::string_view name) {
  const auto* t = by_name(name);
  if (t == nullptr) {
    throw ContractError("SIMD kernel set '" + std::string(name) + "' is not available here");
  }
  current().store(t, std::memory_order_release);
}

}  // namespace sdm::simd
