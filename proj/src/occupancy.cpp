#include "topomap/occupancy.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

namespace topomap {

OccupancyGrid::OccupancyGrid(double voxel_size) : voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::Usage, "voxel_size must be positive");
}

void OccupancyGrid::set(const VoxelIndex& v, VoxelState s) {
  if (s == VoxelState::Unknown) {
    states_.erase(v);
  } else {
    states_[v] = s;
  }
}

std::size_t OccupancyGrid::count(VoxelState s) const {
  if (s == VoxelState::Unknown) return 0;
  return static_cast<std::size_t>(
      std::count_if(states_.begin(), states_.end(), [s](const auto& kv) { return kv.second == s; }));
}

std::vector<VoxelIndex> OccupancyGrid::sorted_indices() const {
  std::vector<VoxelIndex> out;
  out.reserve(states_.size());
  for (const auto& kv : states_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  return out;
}

bool OccupancyGrid::index_bounds(VoxelIndex& lo, VoxelIndex& hi) const {
  if (states_.empty()) return false;
  lo = hi = states_.begin()->first;
  for (const auto& kv : states_) {
    for (int ax = 0; ax < 3; ++ax) {
      lo[ax] = std::min(lo[ax], kv.first[ax]);
      hi[ax] = std::max(hi[ax], kv.first[ax]);
    }
  }
  return true;
}

OccupancyGrid filter_small_components(const OccupancyGrid& occ, std::size_t min_component_size) {
  OccupancyGrid out = occ;
  std::unordered_set<VoxelIndex> visited;
  // Sorted seeds keep the traversal order reproducible.
  for (const VoxelIndex& seed : occ.sorted_indices()) {
    if (occ.state(seed) != VoxelState::Occupied || visited.count(seed)) continue;
    std::vector<VoxelIndex> component;
    std::deque<VoxelIndex> queue{seed};
    visited.insert(seed);
    while (!queue.empty()) {
      VoxelIndex v = queue.front();
      queue.pop_front();
      component.push_back(v);
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
          for (int dk = -1; dk <= 1; ++dk) {
            VoxelIndex n{v.i + di, v.j + dj, v.k + dk};
            if (occ.state(n) == VoxelState::Occupied && visited.insert(n).second) queue.push_back(n);
          }
    }
    if (component.size() < min_component_size) {
      for (const auto& v : component) out.set(v, VoxelState::Free);
    }
  }
  return out;
}

std::vector<VoxelIndex> trajectory_voxels(const std::vector<Point3>& trajectory, double voxel_size) {
  std::vector<VoxelIndex> ordered;
  std::unordered_set<VoxelIndex> seen;
  auto add = [&](const VoxelIndex& v) {
    if (seen.insert(v).second) ordered.push_back(v);
    return true;
  };
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (i == 0 || trajectory[i] == trajectory[i - 1]) {
      add(world_to_voxel(trajectory[i], voxel_size));
    } else {
      walk_ray(trajectory[i - 1], trajectory[i], voxel_size, add);
    }
  }
  return ordered;
}

OccupancyGrid carve_trajectory(const OccupancyGrid& occ, const std::vector<Point3>& trajectory) {
  OccupancyGrid out = occ;
  for (const auto& v : trajectory_voxels(trajectory, occ.voxel_size())) out.set(v, VoxelState::Free);
  return out;
}

void write_occupancy_dump(std::ostream& out, const OccupancyGrid& occ) {
  out << "# OCCUPANCY v1 voxel_size=" << format_fixed(occ.voxel_size()) << '\n';
  for (const auto& v : occ.sorted_indices()) {
    out << v.i << ' ' << v.j << ' ' << v.k << ' '
        << (occ.state(v) == VoxelState::Free ? 'F' : 'O') << '\n';
  }
}

OccupancyGrid read_occupancy_dump(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# OCCUPANCY v1 voxel_size=", 0) != 0) {
    throw Error(ErrorCode::Format, "occupancy dump: missing or unsupported header");
  }
  double voxel_size = 0.0;
  try {
    voxel_size = std::stod(line.substr(line.find('=') + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::Format, "occupancy dump: bad voxel_size");
  }
  OccupancyGrid occ(voxel_size);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    VoxelIndex v;
    char state = 0;
    std::string extra;
    if (!(ss >> v.i >> v.j >> v.k >> state) || (ss >> extra) || (state != 'F' && state != 'O')) {
      throw Error(ErrorCode::Format, "occupancy dump line " + std::to_string(line_no) + ": malformed");
    }
    occ.set(v, state == 'F' ? VoxelState::Free : VoxelState::Occupied);
  }
  return occ;
}

DenseOccupancy::DenseOccupancy(const OccupancyGrid& occ) : voxel_size_(occ.voxel_size()) {
  VoxelIndex hi;
  if (!occ.index_bounds(lo_, hi)) return;
  dims_ = {hi.i - lo_.i + 1, hi.j - lo_.j + 1, hi.k - lo_.k + 1};
  cells_.assign(static_cast<std::size_t>(dims_.i) * dims_.j * dims_.k, VoxelState::Unknown);
  for (const auto& [v, s] : occ.states()) cells_[offset(v)] = s;

  const std::size_t pi = dims_.i + 1, pj = dims_.j + 1, pk = dims_.k + 1;
  prefix_.assign(pi * pj * pk, 0);
  auto at = [&](int i, int j, int k) -> std::int32_t& {
    return prefix_[(static_cast<std::size_t>(k) * pj + j) * pi + i];
  };
  for (int k = 1; k <= dims_.k; ++k)
    for (int j = 1; j <= dims_.j; ++j)
      for (int i = 1; i <= dims_.i; ++i) {
        VoxelIndex v{lo_.i + i - 1, lo_.j + j - 1, lo_.k + k - 1};
        std::int32_t blocked = cells_[offset(v)] == VoxelState::Free ? 0 : 1;
        at(i, j, k) = blocked + at(i - 1, j, k) + at(i, j - 1, k) + at(i, j, k - 1) -
                      at(i - 1, j - 1, k) - at(i - 1, j, k - 1) - at(i, j - 1, k - 1) +
                      at(i - 1, j - 1, k - 1);
      }
}

std::int64_t DenseOccupancy::blocked_prefix(int i, int j, int k) const {
  const std::size_t pi = dims_.i + 1, pj = dims_.j + 1;
  return prefix_[(static_cast<std::size_t>(k) * pj + j) * pi + i];
}

bool DenseOccupancy::box_all_free(const VoxelIndex& a, const VoxelIndex& b) const {
  VoxelIndex lo{std::min(a.i, b.i), std::min(a.j, b.j), std::min(a.k, b.k)};
  VoxelIndex hi{std::max(a.i, b.i), std::max(a.j, b.j), std::max(a.k, b.k)};
  if (!inside(lo) || !inside(hi)) return false;
  const int i0 = lo.i - lo_.i, j0 = lo.j - lo_.j, k0 = lo.k - lo_.k;
  const int i1 = hi.i - lo_.i + 1, j1 = hi.j - lo_.j + 1, k1 = hi.k - lo_.k + 1;
  std::int64_t blocked = blocked_prefix(i1, j1, k1) - blocked_prefix(i0, j1, k1) -
                         blocked_prefix(i1, j0, k1) - blocked_prefix(i1, j1, k0) +
                         blocked_prefix(i0, j0, k1) + blocked_prefix(i0, j1, k0) +
                         blocked_prefix(i1, j0, k0) - blocked_prefix(i0, j0, k0);
  return blocked == 0;
}

bool segment_free(const DenseOccupancy& occ, const VoxelIndex& a, const VoxelIndex& b) {
  // The supercover never leaves the index box spanned by the endpoints.
  if (occ.box_all_free(a, b)) return true;
  return walk_center_segment(a, b, [&](const VoxelIndex& v) { return occ.is_free(v); });
}

}  // namespace topomap
