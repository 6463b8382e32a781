#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "topomap/clustering.hpp"
#include "topomap/synth.hpp"
#include "topomap/topo_map.hpp"
#include "topomap/tsdf.hpp"

namespace topomap {

/// Every tunable of the pipeline. Loaded from a flat `key = value` file; unknown keys are
/// rejected.
struct PipelineConfig {
  double voxel_size = 0.25;
  double truncation_distance = 0.5;
  double max_ray_length = 5.0;
  double occupancy_threshold_fraction = 0.9;
  std::size_t min_component_size = 5;
  double compactness_fraction = 0.98;
  std::optional<double> delta_margin;  // unset: 2 * voxel_size
  double obstacle_ratio_threshold = 0.05;
  std::uint64_t seed = 0;
  // Scene synthesis.
  std::size_t rays_per_pose = 20;
  double landmark_noise_sigma = 0.02;
  double bounds_scale = 1.0;
  bool carve_trajectory = true;

  double resolved_delta_margin() const { return delta_margin.value_or(2.0 * voxel_size); }
  TsdfConfig tsdf() const;
  GrowConfig grow() const;
  MergeConfig merge() const;
  ObservationModel observation_model() const;

  /// Applies one key/value pair; throws Error(Usage) for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

PipelineConfig load_config(std::istream& in);

/// Fully resolved configuration in the same key = value format load_config accepts.
void print_config(std::ostream& out, const PipelineConfig& cfg);

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct BuildResult {
  TsdfGrid tsdf{0.25};
  OccupancyGrid occupancy{0.25};  // binarized, filtered, carved
  std::vector<VoxelCluster> grown;
  std::vector<VoxelCluster> merged;
  MergeStats merge_stats;
  std::size_t portals_before_merge = 0;
  TopologicalMap topo;
  std::vector<StageTiming> timings;
};

/// integrate -> binarize -> filter -> carve -> grow -> merge -> portals.
/// Throws Error(Generic) tagged with the failing stage.
BuildResult build_topomap(const SlamMap& map, const PipelineConfig& cfg);

/// Occupancy from landmarks only (integrate, binarize, filter); used for capture evaluation.
OccupancyGrid sparse_occupancy(const SlamMap& map, const PipelineConfig& cfg, double voxel_size);

}  // namespace topomap
