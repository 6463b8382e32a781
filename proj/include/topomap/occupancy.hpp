#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "topomap/voxel.hpp"

namespace topomap {

enum class VoxelState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

/// Sparse ternary occupancy. Only Free/Occupied are stored; absent means Unknown.
class OccupancyGrid {
 public:
  explicit OccupancyGrid(double voxel_size);

  double voxel_size() const { return voxel_size_; }

  VoxelState state(const VoxelIndex& v) const {
    auto it = states_.find(v);
    return it == states_.end() ? VoxelState::Unknown : it->second;
  }
  bool is_free(const VoxelIndex& v) const { return state(v) == VoxelState::Free; }

  /// Setting Unknown erases the entry.
  void set(const VoxelIndex& v, VoxelState s);

  std::size_t size() const { return states_.size(); }
  std::size_t count(VoxelState s) const;
  const std::unordered_map<VoxelIndex, VoxelState>& states() const { return states_; }

  /// Stored indices in lexicographic order.
  std::vector<VoxelIndex> sorted_indices() const;

  /// Inclusive index bounds of stored voxels; false if empty.
  bool index_bounds(VoxelIndex& lo, VoxelIndex& hi) const;

  bool operator==(const OccupancyGrid& o) const {
    return voxel_size_ == o.voxel_size_ && states_ == o.states_;
  }

 private:
  double voxel_size_;
  std::unordered_map<VoxelIndex, VoxelState> states_;
};

/// Relabels every 26-connected Occupied component smaller than min_component_size as Free.
OccupancyGrid filter_small_components(const OccupancyGrid& occ, std::size_t min_component_size);

/// Marks every voxel containing a pose, and every voxel walked between consecutive poses, Free.
OccupancyGrid carve_trajectory(const OccupancyGrid& occ, const std::vector<Point3>& trajectory);

/// Distinct voxels of the trajectory polyline in first-visit order.
std::vector<VoxelIndex> trajectory_voxels(const std::vector<Point3>& trajectory, double voxel_size);

/// Debug dump: header comment then `i j k F|O` per voxel, lexicographic order.
void write_occupancy_dump(std::ostream& out, const OccupancyGrid& occ);
OccupancyGrid read_occupancy_dump(std::istream& in);

/// Dense snapshot of an OccupancyGrid over its index bounds for fast repeated queries.
/// Anything outside the bounds is Unknown. Also answers "is this index box entirely Free" in
/// O(1) through a 3D prefix sum over non-Free voxels.
class DenseOccupancy {
 public:
  explicit DenseOccupancy(const OccupancyGrid& occ);

  VoxelState state(const VoxelIndex& v) const {
    if (!inside(v)) return VoxelState::Unknown;
    return cells_[offset(v)];
  }
  bool is_free(const VoxelIndex& v) const { return state(v) == VoxelState::Free; }

  /// True iff every voxel in the inclusive box [a, b] (any corner order) is Free.
  bool box_all_free(const VoxelIndex& a, const VoxelIndex& b) const;

  const VoxelIndex& lo() const { return lo_; }
  const VoxelIndex& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }

 private:
  bool inside(const VoxelIndex& v) const {
    return v.i >= lo_.i && v.j >= lo_.j && v.k >= lo_.k && v.i < lo_.i + dims_.i &&
           v.j < lo_.j + dims_.j && v.k < lo_.k + dims_.k;
  }
  std::size_t offset(const VoxelIndex& v) const {
    return (static_cast<std::size_t>(v.k - lo_.k) * dims_.j + (v.j - lo_.j)) * dims_.i + (v.i - lo_.i);
  }
  std::int64_t blocked_prefix(int i, int j, int k) const;

  double voxel_size_;
  VoxelIndex lo_{0, 0, 0};
  VoxelIndex dims_{0, 0, 0};
  std::vector<VoxelState> cells_;
  std::vector<std::int32_t> prefix_;  // (dims+1)^3 inclusive prefix counts of non-Free cells
};

/// True iff the closed supercover of the center-to-center segment contains only Free voxels.
bool segment_free(const DenseOccupancy& occ, const VoxelIndex& a, const VoxelIndex& b);

}  // namespace topomap
