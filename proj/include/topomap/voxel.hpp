#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <vector>

#include "topomap/common.hpp"

namespace topomap {

struct VoxelIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  constexpr int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
  constexpr int& operator[](int axis) { return axis == 0 ? i : (axis == 1 ? j : k); }

  constexpr VoxelIndex operator+(const VoxelIndex& o) const { return {i + o.i, j + o.j, k + o.k}; }
  constexpr VoxelIndex operator-(const VoxelIndex& o) const { return {i - o.i, j - o.j, k - o.k}; }

  constexpr auto operator<=>(const VoxelIndex&) const = default;
};

struct VoxelIndexHash {
  std::size_t operator()(const VoxelIndex& v) const noexcept {
    // Large primes as in the classic spatial hash; mixes well for the signed grid ranges used here.
    std::uint64_t h = static_cast<std::uint64_t>(static_cast<std::int64_t>(v.i)) * 73856093ULL;
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(v.j)) * 19349669ULL;
    h ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(v.k)) * 83492791ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Six face neighbours, in +x,-x,+y,-y,+z,-z order.
inline constexpr std::array<VoxelIndex, 6> kFaceOffsets{{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

/// Component-wise floor(p / voxel_size); voxel faces are lower-inclusive.
VoxelIndex world_to_voxel(const Point3& p, double voxel_size);

inline Point3 voxel_center(const VoxelIndex& v, double voxel_size) {
  return {(v.i + 0.5) * voxel_size, (v.j + 0.5) * voxel_size, (v.k + 0.5) * voxel_size};
}

/// Face-connected walk (Amanatides & Woo) through every voxel whose interior the segment
/// crosses, from origin's voxel to endpoint's voxel. Ties at edges/corners are broken in
/// x, y, z order. The visitor returns false to stop early. Throws for a zero-length segment.
void walk_ray(const Point3& origin, const Point3& endpoint, double voxel_size,
              const std::function<bool(const VoxelIndex&)>& visit);

std::vector<VoxelIndex> traverse_ray(const Point3& origin, const Point3& endpoint,
                                     double voxel_size);

/// Closed supercover of the segment between two voxel centers: every voxel whose closed box
/// meets the segment. Exact integer arithmetic; symmetric in (a, b). Visitor returns false to
/// stop; the function returns false iff it was stopped.
template <typename Visitor>
bool walk_center_segment(const VoxelIndex& a, const VoxelIndex& b, Visitor&& visit) {
  VoxelIndex cur = a;
  if (!visit(cur)) return false;
  std::array<std::int64_t, 3> len{std::abs(b.i - a.i), std::abs(b.j - a.j), std::abs(b.k - a.k)};
  std::array<int, 3> step{b.i > a.i ? 1 : -1, b.j > a.j ? 1 : -1, b.k > a.k ? 1 : -1};
  std::array<std::int64_t, 3> crossed{0, 0, 0};
  // The s-th plane crossing on axis x happens at t = (2s + 1) / (2 len_x).
  auto earlier = [&](int x, int y) {
    return (2 * crossed[x] + 1) * len[y] < (2 * crossed[y] + 1) * len[x];
  };
  auto same = [&](int x, int y) {
    return (2 * crossed[x] + 1) * len[y] == (2 * crossed[y] + 1) * len[x];
  };
  while (true) {
    int best = -1;
    for (int ax = 0; ax < 3; ++ax) {
      if (crossed[ax] >= len[ax]) continue;
      if (best < 0 || earlier(ax, best)) best = ax;
    }
    if (best < 0) return true;
    int tied[3];
    int n_tied = 0;
    for (int ax = 0; ax < 3; ++ax) {
      if (crossed[ax] < len[ax] && (ax == best || same(ax, best))) tied[n_tied++] = ax;
    }
    // Passing exactly through an edge or corner touches every voxel around it.
    const int full = (1 << n_tied) - 1;
    for (int mask = 1; mask < full; ++mask) {
      VoxelIndex side = cur;
      for (int t = 0; t < n_tied; ++t) {
        if (mask & (1 << t)) side[tied[t]] += step[tied[t]];
      }
      if (!visit(side)) return false;
    }
    for (int t = 0; t < n_tied; ++t) {
      cur[tied[t]] += step[tied[t]];
      ++crossed[tied[t]];
    }
    if (!visit(cur)) return false;
  }
}

}  // namespace topomap

template <>
struct std::hash<topomap::VoxelIndex> : topomap::VoxelIndexHash {};
