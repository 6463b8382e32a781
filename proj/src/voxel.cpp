#include "topomap/voxel.hpp"

#include <limits>

namespace topomap {

VoxelIndex world_to_voxel(const Point3& p, double voxel_size) {
  return {static_cast<int>(std::floor(p.x / voxel_size)),
          static_cast<int>(std::floor(p.y / voxel_size)),
          static_cast<int>(std::floor(p.z / voxel_size))};
}

void walk_ray(const Point3& origin, const Point3& endpoint, double voxel_size,
              const std::function<bool(const VoxelIndex&)>& visit) {
  const Point3 dir = endpoint - origin;
  if (norm(dir) <= 0.0) throw Error(ErrorCode::Generic, "traverse_ray: zero-length segment");

  const VoxelIndex start = world_to_voxel(origin, voxel_size);
  const VoxelIndex end = world_to_voxel(endpoint, voxel_size);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};
  std::array<int, 3> remaining{};
  for (int ax = 0; ax < 3; ++ax) {
    remaining[ax] = std::abs(end[ax] - start[ax]);
    if (dir[ax] > 0.0) {
      step[ax] = 1;
      t_delta[ax] = voxel_size / dir[ax];
      t_max[ax] = ((start[ax] + 1) * voxel_size - origin[ax]) / dir[ax];
    } else if (dir[ax] < 0.0) {
      step[ax] = -1;
      t_delta[ax] = -voxel_size / dir[ax];
      t_max[ax] = (start[ax] * voxel_size - origin[ax]) / dir[ax];
    } else {
      step[ax] = 0;
      t_delta[ax] = kInf;
      t_max[ax] = kInf;
    }
  }

  // Step count is fixed by the index distance, so the walk always ends in endpoint's voxel
  // regardless of rounding in t_max.
  VoxelIndex cur = start;
  if (!visit(cur)) return;
  while (remaining[0] + remaining[1] + remaining[2] > 0) {
    int best = -1;
    for (int ax = 0; ax < 3; ++ax) {
      if (remaining[ax] == 0) continue;
      if (best < 0 || t_max[ax] < t_max[best]) best = ax;
    }
    cur[best] += step[best];
    t_max[best] += t_delta[best];
    --remaining[best];
    if (!visit(cur)) return;
  }
}

std::vector<VoxelIndex> traverse_ray(const Point3& origin, const Point3& endpoint,
                                     double voxel_size) {
  std::vector<VoxelIndex> out;
  walk_ray(origin, endpoint, voxel_size, [&](const VoxelIndex& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

}  // namespace topomap
