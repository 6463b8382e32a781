#include "topomap/clustering.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "topomap/simd/halfspace.hpp"

namespace topomap {

void GrowConfig::validate() const {
  if (!(compactness_fraction > 0.0 && compactness_fraction <= 1.0)) {
    throw Error(ErrorCode::Usage, "compactness_fraction must be in (0, 1]");
  }
  if (!(delta_margin >= 0.0)) throw Error(ErrorCode::Usage, "delta_margin must be >= 0");
}

void MergeConfig::validate() const {
  if (!(obstacle_ratio_threshold >= 0.0 && obstacle_ratio_threshold < 1.0)) {
    throw Error(ErrorCode::Usage, "obstacle_ratio_threshold must be in [0, 1)");
  }
}

VoxelCluster make_cluster(int id, std::vector<VoxelIndex> voxels, double voxel_size) {
  if (voxels.empty()) throw Error(ErrorCode::Generic, "make_cluster: empty voxel set");
  std::sort(voxels.begin(), voxels.end());
  VoxelCluster c;
  c.id = id;
  Point3 sum{0, 0, 0};
  for (const auto& v : voxels) sum += voxel_center(v, voxel_size);
  c.centroid = sum / static_cast<double>(voxels.size());
  c.volume_m3 = static_cast<double>(voxels.size()) * voxel_size * voxel_size * voxel_size;

  // Interior voxels (all six face neighbours present) are midpoints of member centers and can
  // never be hull vertices, so only the boundary shell is hulled.
  VoxelSet members(voxels.begin(), voxels.end());
  std::vector<VoxelIndex> shell;
  for (const auto& v : voxels) {
    for (const auto& off : kFaceOffsets) {
      if (!members.count(v + off)) {
        shell.push_back(v);
        break;
      }
    }
  }
  c.hull = compute_voxel_hull(shell, voxel_size, &c.hull_voxels);
  c.voxels = std::move(voxels);
  return c;
}

std::optional<VoxelIndex> seed_cluster(const OccupancyGrid& occ, const std::vector<Point3>& trajectory,
                                       const VoxelSet& already_clustered, Rng& rng) {
  if (trajectory.empty()) throw Error(ErrorCode::Generic, "seed_cluster: empty trajectory");
  std::vector<VoxelIndex> open;
  for (const auto& v : trajectory_voxels(trajectory, occ.voxel_size())) {
    if (!already_clustered.count(v)) open.push_back(v);
  }
  if (open.empty()) return std::nullopt;
  const VoxelIndex pick = open[uniform_index(rng, open.size())];
  if (occ.state(pick) != VoxelState::Free) {
    throw Error(ErrorCode::Generic, "seed_cluster: trajectory voxel is not Free (carve first)");
  }
  return pick;
}

namespace {

template <typename Occ>
std::vector<VoxelIndex> neighbours_free(const Occ& occ, const std::vector<VoxelIndex>& cluster,
                                        const VoxelSet& members, const VoxelSet* claimed) {
  VoxelSet seen;
  std::vector<VoxelIndex> out;
  for (const auto& v : cluster) {
    for (const auto& off : kFaceOffsets) {
      const VoxelIndex n = v + off;
      if (members.count(n) || (claimed && claimed->count(n))) continue;
      if (occ.state(n) != VoxelState::Free) continue;
      if (seen.insert(n).second) out.push_back(n);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<VoxelIndex> adjacent_free_candidates(const OccupancyGrid& occ, const VoxelCluster& cluster) {
  VoxelSet members(cluster.voxels.begin(), cluster.voxels.end());
  return neighbours_free(occ, cluster.voxels, members, nullptr);
}

double compact_radius(const std::vector<VoxelIndex>& voxels, double compactness_fraction,
                      double voxel_size, Point3* centroid_out) {
  const std::size_t n = voxels.size();
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& v : voxels) {
    const Point3 c = voxel_center(v, voxel_size);
    mean += Eigen::Vector3d(c.x, c.y, c.z);
  }
  mean /= static_cast<double>(n);
  if (centroid_out) *centroid_out = {mean.x(), mean.y(), mean.z()};
  if (n < 4) return 0.0;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& v : voxels) {
    const Point3 c = voxel_center(v, voxel_size);
    const Eigen::Vector3d d = Eigen::Vector3d(c.x, c.y, c.z) - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Matrix3d axes = solver.eigenvectors();

  // Nearest-rank percentile of |projection| per principal axis.
  const std::size_t rank =
      std::min(n - 1, static_cast<std::size_t>(std::ceil(compactness_fraction * n)) - 1);
  double r_min = std::numeric_limits<double>::infinity();
  std::vector<double> proj(n);
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector3d axis = axes.col(a);
    for (std::size_t i = 0; i < n; ++i) {
      const Point3 c = voxel_center(voxels[i], voxel_size);
      proj[i] = std::abs((Eigen::Vector3d(c.x, c.y, c.z) - mean).dot(axis));
    }
    std::nth_element(proj.begin(), proj.begin() + static_cast<std::ptrdiff_t>(rank), proj.end());
    r_min = std::min(r_min, proj[rank]);
  }
  return r_min;
}

std::vector<VoxelIndex> compact_filter(const VoxelCluster& cluster,
                                       const std::vector<VoxelIndex>& candidates,
                                       const GrowConfig& cfg, double voxel_size) {
  if (cluster.voxels.size() < 4) return candidates;
  Point3 centroid;
  const double r_min = compact_radius(cluster.voxels, cfg.compactness_fraction, voxel_size, &centroid);
  const double limit = r_min + cfg.delta_margin + 1e-9;
  std::vector<VoxelIndex> out;
  for (const auto& c : candidates) {
    if (distance(voxel_center(c, voxel_size), centroid) <= limit) out.push_back(c);
  }
  return out;
}

std::vector<VoxelIndex> convexity_filter(const OccupancyGrid& occ, const VoxelCluster& cluster,
                                         const std::vector<VoxelIndex>& candidates) {
  const DenseOccupancy dense(occ);
  std::vector<VoxelIndex> out;
  for (const auto& c : candidates) {
    bool ok = true;
    for (const auto& v : cluster.voxels) {
      if (!segment_free(dense, c, v)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(c);
  }
  return out;
}

VoxelCluster grow_cluster(const DenseOccupancy& occ, const VoxelIndex& seed, const GrowConfig& cfg,
                          const VoxelSet* claimed) {
  cfg.validate();
  if (occ.state(seed) != VoxelState::Free) {
    throw Error(ErrorCode::Generic, "grow_cluster: seed voxel is not Free");
  }
  const double vs = occ.voxel_size();
  std::vector<VoxelIndex> voxels{seed};
  VoxelSet members{seed};
  // A candidate with a blocked segment to some member can never join: members only accumulate.
  VoxelSet rejected;

  while (true) {
    std::vector<VoxelIndex> candidates = neighbours_free(occ, voxels, members, claimed);
    std::erase_if(candidates, [&](const VoxelIndex& c) { return rejected.count(c) > 0; });
    if (candidates.empty()) break;

    if (voxels.size() >= 4) {
      Point3 centroid;
      const double r_min = compact_radius(voxels, cfg.compactness_fraction, vs, &centroid);
      const double limit = r_min + cfg.delta_margin + 1e-9;
      std::erase_if(candidates, [&](const VoxelIndex& c) {
        return distance(voxel_center(c, vs), centroid) > limit;
      });
    }

    // Batch: test against the iteration-start cluster, then resolve survivors against each
    // other in lexicographic order (candidates are sorted).
    std::vector<VoxelIndex> accepted;
    for (const auto& c : candidates) {
      bool ok = true;
      for (const auto& v : voxels) {
        if (!segment_free(occ, c, v)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (const auto& a : accepted) {
          if (!segment_free(occ, c, a)) {
            ok = false;
            break;
          }
        }
      }
      if (ok) {
        accepted.push_back(c);
      } else {
        rejected.insert(c);
      }
    }
    if (accepted.empty()) break;
    for (const auto& a : accepted) {
      voxels.push_back(a);
      members.insert(a);
    }
  }
  return make_cluster(0, std::move(voxels), vs);
}

VoxelCluster grow_cluster(const OccupancyGrid& occ, const VoxelIndex& seed, const GrowConfig& cfg,
                          const VoxelSet* claimed) {
  return grow_cluster(DenseOccupancy(occ), seed, cfg, claimed);
}

std::vector<VoxelCluster> grow_all(const OccupancyGrid& occ, const std::vector<Point3>& trajectory,
                                   const GrowConfig& cfg) {
  cfg.validate();
  const DenseOccupancy dense(occ);
  Rng rng(cfg.rng_seed);
  VoxelSet claimed;
  std::vector<VoxelCluster> clusters;
  while (auto seed = seed_cluster(occ, trajectory, claimed, rng)) {
    VoxelCluster c = grow_cluster(dense, *seed, cfg, &claimed);
    c.id = static_cast<int>(clusters.size());
    claimed.insert(c.voxels.begin(), c.voxels.end());
    clusters.push_back(std::move(c));
  }
  return clusters;
}

double obstacle_ratio(const DenseOccupancy& occ, const ConvexHull& hull) {
  if (hull.vertices.empty()) throw Error(ErrorCode::Generic, "obstacle_ratio: empty hull");
  const double vs = occ.voxel_size();
  const double eps = kHullEpsilon;
  Box3 box{hull.vertices.front(), hull.vertices.front()};
  for (const auto& p : hull.vertices) box.expand(p);
  // Centers (i + 0.5) * vs inside [min - eps, max + eps].
  VoxelIndex lo, hi;
  for (int ax = 0; ax < 3; ++ax) {
    lo[ax] = static_cast<int>(std::ceil((box.min[ax] - eps) / vs - 0.5));
    hi[ax] = static_cast<int>(std::floor((box.max[ax] + eps) / vs - 0.5));
  }
  if (hi.i < lo.i || hi.j < lo.j || hi.k < lo.k) {
    throw Error(ErrorCode::Generic, "obstacle_ratio: hull contains no voxel centers");
  }

  const simd::HalfSpaceSoA soa(hull.faces);
  const simd::RowKernel kernel = simd::active_row_kernel();
  const std::size_t row = static_cast<std::size_t>(hi.i - lo.i + 1);
  std::vector<std::uint8_t> inside(row);
  std::size_t total = 0, blocked = 0;
  for (int k = lo.k; k <= hi.k; ++k) {
    for (int j = lo.j; j <= hi.j; ++j) {
      kernel(soa, (lo.i + 0.5) * vs, vs, (j + 0.5) * vs, (k + 0.5) * vs, row, eps, inside.data());
      for (std::size_t n = 0; n < row; ++n) {
        if (!inside[n]) continue;
        ++total;
        if (occ.state({lo.i + static_cast<int>(n), j, k}) != VoxelState::Free) ++blocked;
      }
    }
  }
  if (total == 0) throw Error(ErrorCode::Generic, "obstacle_ratio: hull contains no voxel centers");
  return static_cast<double>(blocked) / static_cast<double>(total);
}

double obstacle_ratio(const OccupancyGrid& occ, const ConvexHull& hull) {
  return obstacle_ratio(DenseOccupancy(occ), hull);
}

std::vector<std::pair<int, int>> adjacent_cluster_pairs(const std::vector<VoxelCluster>& clusters) {
  std::unordered_map<VoxelIndex, int> owner;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (const auto& v : clusters[c].voxels) owner[v] = static_cast<int>(c);
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (const auto& v : clusters[c].voxels) {
      for (int ax = 0; ax < 3; ++ax) {
        VoxelIndex n = v;
        ++n[ax];
        auto it = owner.find(n);
        if (it == owner.end() || it->second == static_cast<int>(c)) continue;
        pairs.emplace_back(std::min<int>(c, it->second), std::max<int>(c, it->second));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

MergePassResult merge_pass(const DenseOccupancy& occ, const std::vector<VoxelCluster>& clusters,
                           const MergeConfig& cfg, Rng& rng) {
  cfg.validate();
  const double vs = occ.voxel_size();
  std::vector<std::pair<int, int>> pairs = adjacent_cluster_pairs(clusters);
  shuffle(pairs, rng);

  std::vector<char> touched(clusters.size(), 0);
  // merged_into[a] holds the merged cluster for the pair led by a.
  std::vector<std::optional<VoxelCluster>> merged(clusters.size());
  std::size_t merges = 0;
  for (const auto& [a, b] : pairs) {
    if (touched[a] || touched[b]) continue;
    std::vector<VoxelIndex> extreme = clusters[a].hull_voxels;
    extreme.insert(extreme.end(), clusters[b].hull_voxels.begin(), clusters[b].hull_voxels.end());
    std::vector<VoxelIndex> span;
    ConvexHull combined = compute_voxel_hull(extreme, vs, &span);
    if (obstacle_ratio(occ, combined) >= cfg.obstacle_ratio_threshold) continue;

    touched[a] = touched[b] = 1;
    std::vector<VoxelIndex> voxels = clusters[a].voxels;
    voxels.insert(voxels.end(), clusters[b].voxels.begin(), clusters[b].voxels.end());
    std::sort(voxels.begin(), voxels.end());
    VoxelCluster m;
    Point3 sum{0, 0, 0};
    for (const auto& v : voxels) sum += voxel_center(v, vs);
    m.centroid = sum / static_cast<double>(voxels.size());
    m.volume_m3 = static_cast<double>(voxels.size()) * vs * vs * vs;
    m.hull = std::move(combined);
    m.hull_voxels = std::move(span);
    m.voxels = std::move(voxels);
    merged[std::min(a, b)] = std::move(m);
    ++merges;
  }

  MergePassResult result;
  result.merges = merges;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (merged[c]) {
      result.clusters.push_back(std::move(*merged[c]));
    } else if (!touched[c]) {
      result.clusters.push_back(clusters[c]);
    }
  }
  for (std::size_t i = 0; i < result.clusters.size(); ++i) result.clusters[i].id = static_cast<int>(i);
  return result;
}

MergePassResult merge_pass(const OccupancyGrid& occ, const std::vector<VoxelCluster>& clusters,
                           const MergeConfig& cfg, Rng& rng) {
  return merge_pass(DenseOccupancy(occ), clusters, cfg, rng);
}

std::vector<VoxelCluster> merge_all(const DenseOccupancy& occ, std::vector<VoxelCluster> clusters,
                                    const MergeConfig& cfg, Rng& rng, MergeStats* stats) {
  MergeStats local;
  while (true) {
    MergePassResult pass = merge_pass(occ, clusters, cfg, rng);
    ++local.passes;
    local.clusters_after_pass.push_back(pass.clusters.size());
    clusters = std::move(pass.clusters);
    if (pass.merges == 0) break;
  }
  if (stats) *stats = local;
  return clusters;
}

std::vector<VoxelCluster> merge_all(const OccupancyGrid& occ, std::vector<VoxelCluster> clusters,
                                    const MergeConfig& cfg, MergeStats* stats) {
  Rng rng(cfg.rng_seed);
  return merge_all(DenseOccupancy(occ), std::move(clusters), cfg, rng, stats);
}

}  // namespace topomap
