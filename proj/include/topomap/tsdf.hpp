#pragma once

#include <iosfwd>
#include <unordered_map>

#include "topomap/occupancy.hpp"
#include "topomap/slam_map.hpp"

namespace topomap {

struct TsdfVoxel {
  double distance = 0.0;
  double weight = 0.0;
};

struct TsdfConfig {
  double truncation_distance = 0.5;
  double max_ray_length = 5.0;
  double occupancy_threshold_fraction = 0.9;
  std::size_t min_component_size = 5;

  /// Throws Error(Usage) when an invariant is violated.
  void validate() const;
};

class TsdfGrid {
 public:
  explicit TsdfGrid(double voxel_size);

  double voxel_size() const { return voxel_size_; }
  const std::unordered_map<VoxelIndex, TsdfVoxel>& voxels() const { return voxels_; }
  const TsdfVoxel* find(const VoxelIndex& v) const {
    auto it = voxels_.find(v);
    return it == voxels_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return voxels_.size(); }
  std::size_t skipped_rays() const { return skipped_rays_; }

  /// Projective update along observer -> landmark + truncation. Rays longer than
  /// cfg.max_ray_length are skipped and counted.
  void integrate(const LandmarkObservation& obs, const TsdfConfig& cfg);

 private:
  double voxel_size_;
  std::unordered_map<VoxelIndex, TsdfVoxel> voxels_;
  std::size_t skipped_rays_ = 0;
};

TsdfGrid integrate_slam_map(const SlamMap& map, const TsdfConfig& cfg, double voxel_size);

/// distance < fraction * truncation -> Occupied, otherwise Free (signed comparison).
OccupancyGrid binarize(const TsdfGrid& grid, const TsdfConfig& cfg);

/// `i j k distance weight` per voxel, lexicographic order.
void write_tsdf_dump(std::ostream& out, const TsdfGrid& grid);

}  // namespace topomap
