#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "topomap/occupancy.hpp"
#include "topomap/slam_map.hpp"
#include "topomap/topo_map.hpp"

namespace topomap {

/// Axis-aligned box world with a named layout.
struct SceneSpec {
  std::string preset_name;
  Box3 bounds;
  std::vector<Box3> obstacles;
};

struct Scene {
  SceneSpec spec;
  std::vector<Point3> trajectory;  // explorer poses, free space
};

const std::vector<std::string>& preset_names();

/// Deterministic scene + explorer trajectory for a named preset, uniformly scaled by
/// bounds_scale. Throws Error(Usage) for an unknown name.
Scene build_preset(const std::string& name, double bounds_scale, Rng& rng);

/// Ground truth: voxel Occupied iff its center lies in an obstacle, Free elsewhere in bounds.
OccupancyGrid rasterize(const SceneSpec& scene, double voxel_size);

struct ObservationModel {
  double max_range = 5.0;
  std::size_t rays_per_pose = 20;
  double landmark_noise_sigma = 0.02;
  std::uint64_t rng_seed = 0;
};

/// Uniform-sphere rays from every pose; the nearest obstacle hit within max_range becomes a
/// landmark (plus isotropic Gaussian noise). Misses produce nothing.
SlamMap simulate_observations(const SceneSpec& scene, const std::vector<Point3>& trajectory,
                              const ObservationModel& model);

/// Slab-method ray/box hit distance along a unit direction; negative when missed.
double ray_box_hit(const Point3& origin, const Point3& dir, const Box3& box);

struct GridPath {
  std::vector<Point3> waypoints;  // voxel centers
  double length = 0.0;
  std::size_t expanded = 0;
};

/// Optimal 26-connected A* over Free voxels with metric step costs and Euclidean heuristic.
/// Throws Error(Generic) when an endpoint voxel is not Free and Error(NoPath) when
/// disconnected.
GridPath grid_astar(const DenseOccupancy& occ, const Point3& a, const Point3& b);
GridPath grid_astar(const OccupancyGrid& occ, const Point3& a, const Point3& b);

struct CaptureRatio {
  double free_captured = 0.0;
  double occupied_captured = 0.0;
};

/// free: reference-Free voxels that are Free in test. occupied: reference-Occupied voxels that
/// are Occupied or Unknown in test.
CaptureRatio captured_space_ratio(const OccupancyGrid& test, const OccupancyGrid& reference);

struct BenchmarkRecord {
  Point3 a, b;
  double direct_m = 0.0;
  double topo_m = 0.0;
  double grid_m = 0.0;
  double topo_time_us = 0.0;
  double grid_time_us = 0.0;
  double topo_norm = 0.0;
  double grid_norm = 0.0;
};

/// Random A/B pairs drawn from cluster-owned voxel centers with direct distance above two voxel
/// sizes; both planners are run and timed.
std::vector<BenchmarkRecord> benchmark_planners(const TopologicalMap& topo, const NavGraph& nav,
                                                const OccupancyGrid& occ, std::size_t n_queries,
                                                Rng& rng);

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);

/// Scene file: `SCENE v1 <preset>`, `B x0 y0 z0 x1 y1 z1` bounds, `X ...` obstacles.
void write_scene(std::ostream& out, const SceneSpec& scene);
SceneSpec read_scene(std::istream& in);

}  // namespace topomap
