#include <atomic>

#include "topomap/simd/halfspace.hpp"

namespace topomap::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::atomic<RowKernel> g_active{nullptr};

}  // namespace

Isa detected_isa() { return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar; }

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

RowKernel row_kernel(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2 && cpu_has_avx2()) return &classify_row_avx2;
#endif
  (void)isa;
  return &classify_row_scalar;
}

RowKernel active_row_kernel() {
  RowKernel k = g_active.load(std::memory_order_acquire);
  if (k == nullptr) {
    k = row_kernel(detected_isa());
    g_active.store(k, std::memory_order_release);
  }
  return k;
}

void pin_isa(Isa isa) { g_active.store(row_kernel(isa), std::memory_order_release); }

}  // namespace topomap::simd
