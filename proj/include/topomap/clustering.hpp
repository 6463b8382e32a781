#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "topomap/hull.hpp"
#include "topomap/occupancy.hpp"

namespace topomap {

/// A convex free-space region: a topological vertex.
struct VoxelCluster {
  int id = 0;
  std::vector<VoxelIndex> voxels;  // sorted; may be empty for maps loaded from disk
  Point3 centroid;                 // mean of voxel centers
  ConvexHull hull;                 // hull of voxel centers
  double volume_m3 = 0.0;          // voxel count * voxel_size^3
  std::vector<VoxelIndex> hull_voxels;  // voxels whose centers span the hull
};

/// Builds a cluster (centroid, hull, volume) from its voxels.
VoxelCluster make_cluster(int id, std::vector<VoxelIndex> voxels, double voxel_size);

struct GrowConfig {
  double compactness_fraction = 0.98;
  double delta_margin = 0.5;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct MergeConfig {
  double obstacle_ratio_threshold = 0.05;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

using VoxelSet = std::unordered_set<VoxelIndex>;

/// Uniformly random Free trajectory voxel not yet clustered; nullopt when all are clustered.
std::optional<VoxelIndex> seed_cluster(const OccupancyGrid& occ, const std::vector<Point3>& trajectory,
                                       const VoxelSet& already_clustered, Rng& rng);

/// Free face neighbours of the cluster that are not cluster members (sorted). Unknown voxels
/// never qualify.
std::vector<VoxelIndex> adjacent_free_candidates(const OccupancyGrid& occ, const VoxelCluster& cluster);

/// Keeps candidates within r_min + delta of the centroid, where r_min is the smallest of the
/// per-principal-axis semi-extents holding compactness_fraction of the cluster voxels.
/// Clusters of fewer than 4 voxels pass everything.
std::vector<VoxelIndex> compact_filter(const VoxelCluster& cluster,
                                       const std::vector<VoxelIndex>& candidates,
                                       const GrowConfig& cfg, double voxel_size);

/// Smallest principal semi-extent of the cluster (0 for clusters of fewer than 4 voxels).
double compact_radius(const std::vector<VoxelIndex>& voxels, double compactness_fraction,
                      double voxel_size, Point3* centroid_out = nullptr);

/// Keeps candidates whose segments to every cluster voxel cross only Free voxels, judged
/// against the cluster as passed in.
std::vector<VoxelIndex> convexity_filter(const OccupancyGrid& occ, const VoxelCluster& cluster,
                                         const std::vector<VoxelIndex>& candidates);

/// Iterates candidates -> compact -> convex until nothing is added. `claimed` voxels (owned by
/// other clusters) are never candidates. Throws if the seed is not Free.
VoxelCluster grow_cluster(const OccupancyGrid& occ, const VoxelIndex& seed, const GrowConfig& cfg,
                          const VoxelSet* claimed = nullptr);
VoxelCluster grow_cluster(const DenseOccupancy& occ, const VoxelIndex& seed, const GrowConfig& cfg,
                          const VoxelSet* claimed = nullptr);

/// Grows clusters from random trajectory seeds until every trajectory voxel is clustered.
std::vector<VoxelCluster> grow_all(const OccupancyGrid& occ, const std::vector<Point3>& trajectory,
                                   const GrowConfig& cfg);

/// Fraction of Occupied-or-Unknown voxels among all voxels whose centers lie in the hull.
/// Throws if no voxel center is inside.
double obstacle_ratio(const OccupancyGrid& occ, const ConvexHull& hull);
double obstacle_ratio(const DenseOccupancy& occ, const ConvexHull& hull);

struct MergePassResult {
  std::vector<VoxelCluster> clusters;
  std::size_t merges = 0;
};

/// Index pairs (a < b) of clusters with at least one face-adjacent voxel pair, sorted.
std::vector<std::pair<int, int>> adjacent_cluster_pairs(const std::vector<VoxelCluster>& clusters);

/// One randomized pass: each adjacent pair whose members are both untouched this pass is merged
/// iff the obstacle ratio of the combined hull is below the threshold. Output ids are dense.
MergePassResult merge_pass(const OccupancyGrid& occ, const std::vector<VoxelCluster>& clusters,
                           const MergeConfig& cfg, Rng& rng);
MergePassResult merge_pass(const DenseOccupancy& occ, const std::vector<VoxelCluster>& clusters,
                           const MergeConfig& cfg, Rng& rng);

struct MergeStats {
  std::size_t passes = 0;  // including the final pass with no merge
  std::vector<std::size_t> clusters_after_pass;
};

/// merge_pass until a pass performs no merge.
std::vector<VoxelCluster> merge_all(const DenseOccupancy& occ, std::vector<VoxelCluster> clusters,
                                    const MergeConfig& cfg, Rng& rng, MergeStats* stats = nullptr);
/// Same, with a generator seeded from cfg.rng_seed.
std::vector<VoxelCluster> merge_all(const OccupancyGrid& occ, std::vector<VoxelCluster> clusters,
                                    const MergeConfig& cfg, MergeStats* stats = nullptr);

}  // namespace topomap
