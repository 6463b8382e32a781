#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "topomap/hull.hpp"

namespace topomap::simd {

/// Half-space set in structure-of-arrays layout for the row kernels.
struct HalfSpaceSoA {
  std::vector<double> nx, ny, nz, offset;

  explicit HalfSpaceSoA(std::span<const HalfSpace> faces);
  std::size_t size() const { return offset.size(); }
};

/// Classifies the row of points (x0 + i*dx, y, z), i in [0, count): inside[i] = 1 iff
/// nx*x + ny*y + nz*z - offset <= eps for every half-space, evaluated left to right without
/// fused multiply-add. All variants give bit-identical results.
using RowKernel = void (*)(const HalfSpaceSoA& hs, double x0, double dx, double y, double z,
                           std::size_t count, double eps, std::uint8_t* inside);

void classify_row_scalar(const HalfSpaceSoA& hs, double x0, double dx, double y, double z,
                         std::size_t count, double eps, std::uint8_t* inside);
#if defined(__x86_64__) || defined(_M_X64)
void classify_row_avx2(const HalfSpaceSoA& hs, double x0, double dx, double y, double z,
                       std::size_t count, double eps, std::uint8_t* inside);
#endif

enum class Isa { Scalar, Avx2 };

/// Best variant the running CPU supports.
Isa detected_isa();
std::string_view isa_name(Isa isa);

/// Kernel for the given ISA; Avx2 falls back to scalar if unsupported.
RowKernel row_kernel(Isa isa);

/// Kernel in use by the library. Defaults to detected_isa(); tests may pin it.
RowKernel active_row_kernel();
void pin_isa(Isa isa);

}  // namespace topomap::simd
