#include "topomap/tsdf.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

namespace topomap {

void TsdfConfig::validate() const {
  if (!(truncation_distance > 0.0)) throw Error(ErrorCode::Usage, "truncation_distance must be > 0");
  if (!(occupancy_threshold_fraction > 0.0 && occupancy_threshold_fraction < 1.0)) {
    throw Error(ErrorCode::Usage, "occupancy_threshold_fraction must be in (0, 1)");
  }
  if (!(max_ray_length > truncation_distance)) {
    throw Error(ErrorCode::Usage, "max_ray_length must exceed truncation_distance");
  }
}

TsdfGrid::TsdfGrid(double voxel_size) : voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::Usage, "voxel_size must be positive");
}

void TsdfGrid::integrate(const LandmarkObservation& obs, const TsdfConfig& cfg) {
  const Point3 ray = obs.landmark - obs.observer;
  const double length = norm(ray);
  if (length > cfg.max_ray_length) {
    ++skipped_rays_;
    return;
  }
  const double trunc = cfg.truncation_distance;
  const Point3 dir = ray / length;
  const Point3 end = obs.landmark + dir * trunc;
  walk_ray(obs.observer, end, voxel_size_, [&](const VoxelIndex& v) {
    const double along = dot(voxel_center(v, voxel_size_) - obs.observer, dir);
    const double sdf = std::clamp(length - along, -trunc, trunc);
    TsdfVoxel& vox = voxels_[v];
    vox.distance = (vox.distance * vox.weight + sdf) / (vox.weight + 1.0);
    vox.weight += 1.0;
    return true;
  });
}

TsdfGrid integrate_slam_map(const SlamMap& map, const TsdfConfig& cfg, double voxel_size) {
  cfg.validate();
  TsdfGrid grid(voxel_size);
  for (const auto& obs : map.observations) grid.integrate(obs, cfg);
  return grid;
}

OccupancyGrid binarize(const TsdfGrid& grid, const TsdfConfig& cfg) {
  OccupancyGrid occ(grid.voxel_size());
  const double threshold = cfg.occupancy_threshold_fraction * cfg.truncation_distance;
  for (const auto& [v, vox] : grid.voxels()) {
    occ.set(v, vox.distance < threshold ? VoxelState::Occupied : VoxelState::Free);
  }
  return occ;
}

void write_tsdf_dump(std::ostream& out, const TsdfGrid& grid) {
  std::vector<VoxelIndex> keys;
  keys.reserve(grid.size());
  for (const auto& kv : grid.voxels()) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  out << "# TSDF v1 voxel_size=" << format_fixed(grid.voxel_size()) << '\n';
  for (const auto& v : keys) {
    const TsdfVoxel& vox = grid.voxels().at(v);
    out << v.i << ' ' << v.j << ' ' << v.k << ' ' << format_fixed(vox.distance) << ' '
        << format_fixed(vox.weight) << '\n';
  }
}

}  // namespace topomap
