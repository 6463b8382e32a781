#pragma once

#include <span>
#include <vector>

#include "topomap/voxel.hpp"

namespace topomap {

/// Half-space `dot(normal, p) <= offset`, normal of unit length.
struct HalfSpace {
  Point3 normal;
  double offset = 0.0;
};

inline constexpr double kHullEpsilon = 1e-9;        // containment tolerance
inline constexpr double kDegenerateInflation = 1e-6;  // collinear/coplanar/point inputs

struct ConvexHull {
  std::vector<Point3> vertices;  // lexicographically sorted
  std::vector<HalfSpace> faces;  // one per distinct supporting plane
  double volume = 0.0;
  bool inflated = false;  // input was degenerate and got inflated before hulling
};

/// Quickhull over arbitrary points. Collinear, coplanar and single-point inputs are inflated
/// symmetrically by kDegenerateInflation first. Throws on empty input.
ConvexHull compute_hull(std::span<const Point3> points);

/// Hull of voxel centers. Runs Quickhull on the integer lattice with exact predicates, then maps
/// to world coordinates. `extreme` (optional) receives the voxels that are hull vertices; for
/// degenerate inputs it receives every input voxel.
ConvexHull compute_voxel_hull(std::span<const VoxelIndex> voxels, double voxel_size,
                              std::vector<VoxelIndex>* extreme = nullptr);

bool hull_contains(const ConvexHull& hull, const Point3& p, double eps = kHullEpsilon);

}  // namespace topomap
