#pragma once

#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "topomap/clustering.hpp"

namespace topomap {

/// Shared face region between two adjacent clusters.
struct Portal {
  int id = 0;
  int vertex_a = 0;
  int vertex_b = 0;
  std::vector<Point3> shared_faces;  // face centers; empty for maps loaded from disk
  std::size_t face_count = 0;
  Point3 center;
};

/// Clusters (vertices) and portals (edges). Vertex ids equal their position.
struct TopologicalMap {
  double voxel_size = 0.25;
  std::vector<VoxelCluster> vertices;
  std::vector<Portal> portals;

  bool has_voxels() const;
  /// Owner lookup for voxel-based point location; rebuilt by index_voxels().
  std::unordered_map<VoxelIndex, int> owner;
  void index_voxels();
};

/// One portal per cluster pair with at least one face-adjacent voxel pair; ids follow the
/// sorted (vertex_a, vertex_b) order.
std::vector<Portal> extract_portals(const std::vector<VoxelCluster>& clusters, double voxel_size);

TopologicalMap make_topological_map(std::vector<VoxelCluster> clusters, double voxel_size);

struct NavEdge {
  int a = 0;
  int b = 0;
  double weight = 0.0;
  int vertex = 0;  // cluster the straight segment runs through
};

/// Dual graph: one node per portal center, complete graph among each vertex's portals.
struct NavGraph {
  std::vector<Point3> nodes;  // index == portal id
  std::vector<NavEdge> edges;
  std::vector<std::vector<int>> vertex_portals;  // portal ids per vertex, ascending
  std::vector<std::vector<std::pair<int, int>>> adjacency;  // node -> (neighbour, edge index)
};

NavGraph build_nav_graph(const TopologicalMap& topo);

/// Cluster containing p: voxel ownership when voxel sets are present, otherwise hull
/// containment (smallest hull volume, then smallest id). Throws Error(NotLocated).
int locate(const TopologicalMap& topo, const Point3& p);

struct PlanResult {
  std::vector<Point3> waypoints;  // A, portal centers..., B
  double length = 0.0;
  std::vector<int> vertex_sequence;
};

/// A* over the navigation graph augmented with A and B. Throws Error(NotLocated) or
/// Error(NoPath).
PlanResult plan(const TopologicalMap& topo, const NavGraph& nav, const Point3& a, const Point3& b);

/// Hull-only text format, see README.
void serialize_topomap(std::ostream& out, const TopologicalMap& topo);
TopologicalMap deserialize_topomap(std::istream& in);

}  // namespace topomap
