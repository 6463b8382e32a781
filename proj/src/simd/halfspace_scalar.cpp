#include "topomap/simd/halfspace.hpp"

namespace topomap::simd {

HalfSpaceSoA::HalfSpaceSoA(std::span<const HalfSpace> faces) {
  nx.reserve(faces.size());
  ny.reserve(faces.size());
  nz.reserve(faces.size());
  offset.reserve(faces.size());
  for (const auto& f : faces) {
    nx.push_back(f.normal.x);
    ny.push_back(f.normal.y);
    nz.push_back(f.normal.z);
    offset.push_back(f.offset);
  }
}

void classify_row_scalar(const HalfSpaceSoA& hs, double x0, double dx, double y, double z,
                         std::size_t count, double eps, std::uint8_t* inside) {
  const std::size_t faces = hs.size();
  for (std::size_t i = 0; i < count; ++i) {
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

}  // namespace topomap::simd
