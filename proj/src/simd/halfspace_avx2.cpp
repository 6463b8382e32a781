// Compiled with -mavx2 (no FMA); only reached after a runtime CPU check.
#include <immintrin.h>

#include "topomap/simd/halfspace.hpp"

namespace topomap::simd {

void classify_row_avx2(const HalfSpaceSoA& hs, double x0, double dx, double y, double z,
                       std::size_t count, double eps, std::uint8_t* inside) {
  const std::size_t faces = hs.size();
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vy = _mm256_set1_pd(y);
  const __m256d vz = _mm256_set1_pd(z);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
    const __m256d x = _mm256_add_pd(vx0, _mm256_mul_pd(idx, vdx));
    __m256d all_in = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t f = 0; f < faces; ++f) {
      __m256d d = _mm256_mul_pd(_mm256_set1_pd(hs.nx[f]), x);
      d = _mm256_add_pd(d, _mm256_mul_pd(_mm256_set1_pd(hs.ny[f]), vy));
      d = _mm256_add_pd(d, _mm256_mul_pd(_mm256_set1_pd(hs.nz[f]), vz));
      d = _mm256_sub_pd(d, _mm256_set1_pd(hs.offset[f]));
      all_in = _mm256_and_pd(all_in, _mm256_cmp_pd(d, veps, _CMP_LE_OQ));
      if (_mm256_movemask_pd(all_in) == 0) break;
    }
    const int mask = _mm256_movemask_pd(all_in);
    inside[i] = mask & 1;
    inside[i + 1] = (mask >> 1) & 1;
    inside[i + 2] = (mask >> 2) & 1;
    inside[i + 3] = (mask >> 3) & 1;
  }
  if (i < count) {
    // x must come from the global index to stay bit-identical with the scalar kernel.
    for (; i < count; ++i) {
      const double x = x0 + static_cast<double>(i) * dx;
      std::uint8_t in = 1;
      for (std::size_t f = 0; f < faces && in; ++f) {
        double d = hs.nx[f] * x;
        d = d + hs.ny[f] * y;
        d = d + hs.nz[f] * z;
        d = d - hs.offset[f];
        in = d <= eps;
      }
      inside[i] = in;
    }
  }
}

}  // namespace topomap::simd
