#include "topomap/synth.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

namespace topomap {
namespace {

constexpr double kWall = 0.4;

Box3 box(double x0, double y0, double z0, double x1, double y1, double z1) {
  return {{x0, y0, z0}, {x1, y1, z1}};
}

/// Floor, ceiling and four outer walls, all inside the bounds.
void add_shell(SceneSpec& s) {
  const Point3 lo = s.bounds.min, hi = s.bounds.max;
  s.obstacles.push_back(box(lo.x, lo.y, lo.z, hi.x, hi.y, lo.z + kWall));
  s.obstacles.push_back(box(lo.x, lo.y, hi.z - kWall, hi.x, hi.y, hi.z));
  s.obstacles.push_back(box(lo.x, lo.y, lo.z, lo.x + kWall, hi.y, hi.z));
  s.obstacles.push_back(box(hi.x - kWall, lo.y, lo.z, hi.x, hi.y, hi.z));
  s.obstacles.push_back(box(lo.x, lo.y, lo.z, hi.x, lo.y + kWall, hi.z));
  s.obstacles.push_back(box(lo.x, hi.y - kWall, lo.z, hi.x, hi.y, hi.z));
}

/// Wall along x at [y0, y1] from x_start to x_end with door gaps (center, width) up to door_top.
void add_wall_x(SceneSpec& s, double x_start, double x_end, double y0, double y1, double z0, double z1,
                const std::vector<double>& door_centers, double door_width, double door_top) {
  double x = x_start;
  for (double c : door_centers) {
    const double d0 = c - door_width / 2, d1 = c + door_width / 2;
    if (d0 > x) s.obstacles.push_back(box(x, y0, z0, d0, y1, z1));
    s.obstacles.push_back(box(d0, y0, door_top, d1, y1, z1));
    x = d1;
  }
  if (x < x_end) s.obstacles.push_back(box(x, y0, z0, x_end, y1, z1));
}

/// Poses every `spacing` meters along the polyline.
std::vector<Point3> densify(const std::vector<Point3>& waypoints, double spacing) {
  std::vector<Point3> poses{waypoints.front()};
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const Point3 a = waypoints[i - 1], b = waypoints[i];
    const double len = distance(a, b);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int s = 1; s <= steps; ++s) poses.push_back(a + (b - a) * (static_cast<double>(s) / steps));
  }
  return poses;
}

void jitter(std::vector<Point3>& waypoints, double amount, Rng& rng) {
  for (std::size_t i = 1; i + 1 < waypoints.size(); ++i) {
    waypoints[i].x += (2.0 * uniform_unit(rng) - 1.0) * amount;
    waypoints[i].y += (2.0 * uniform_unit(rng) - 1.0) * amount;
  }
}

void translate(Scene& sc, const Point3& t) {
  sc.spec.bounds.min = sc.spec.bounds.min + t;
  sc.spec.bounds.max = sc.spec.bounds.max + t;
  for (auto& b : sc.spec.obstacles) {
    b.min = b.min + t;
    b.max = b.max + t;
  }
  for (auto& p : sc.trajectory) p = p + t;
}

Scene corridor_preset(Rng& rng) {
  Scene sc;
  sc.spec.bounds = box(0, 0, 0, 12, 3, 3);
  add_shell(sc.spec);
  const double z = 1.5;
  std::vector<Point3> wp{{1.2, 1.5, z}, {4.0, 1.5, z}, {8.0, 1.5, z}, {10.8, 1.5, z}};
  jitter(wp, 0.15, rng);
  sc.trajectory = wp;
  return sc;
}

Scene two_room_preset(Rng& rng) {
  Scene sc;
  sc.spec.bounds = box(0, 0, 0, 11, 6, 3);
  add_shell(sc.spec);
  // Dividing wall along y with one door (y 2.2..3.8, up to z 2.3).
  sc.spec.obstacles.push_back(box(5.3, 0.4, 0.4, 5.7, 2.2, 2.6));
  sc.spec.obstacles.push_back(box(5.3, 3.8, 0.4, 5.7, 5.6, 2.6));
  sc.spec.obstacles.push_back(box(5.3, 2.2, 2.3, 5.7, 3.8, 2.6));
  const double z = 1.5;
  std::vector<Point3> wp{{1.5, 1.5, z}, {4.0, 3.0, z}, {7.0, 3.0, z}, {9.5, 4.5, z}, {9.5, 1.5, z}};
  jitter(wp, 0.1, rng);
  sc.trajectory = wp;
  return sc;
}

Scene office_preset(Rng& rng) {
  Scene sc;
  sc.spec.bounds = box(0, 0, 0, 16, 11, 3);
  add_shell(sc.spec);
  const std::vector<double> doors{2.8, 8.0, 13.2};
  // Corridor walls (y 4.2..4.6 south, 6.4..6.8 north) with doors; room partitions.
  add_wall_x(sc.spec, 0.4, 15.6, 4.2, 4.6, 0.4, 2.6, doors, 1.4, 2.4);
  add_wall_x(sc.spec, 0.4, 15.6, 6.4, 6.8, 0.4, 2.6, doors, 1.4, 2.4);
  for (double x : {5.2, 10.4}) {
    sc.spec.obstacles.push_back(box(x, 0.4, 0.4, x + 0.4, 4.2, 2.6));
    sc.spec.obstacles.push_back(box(x, 6.8, 0.4, x + 0.4, 10.6, 2.6));
  }
  const double z = 1.5;
  std::vector<Point3> wp{{1.2, 5.5, z},  {2.8, 5.5, z},  {2.8, 2.2, z}, {2.8, 5.5, z},
                         {8.0, 5.5, z},  {8.0, 8.7, z},  {8.0, 5.5, z}, {13.2, 5.5, z},
                         {13.2, 2.2, z}, {13.2, 5.5, z}, {14.8, 5.5, z}};
  jitter(wp, 0.1, rng);
  sc.trajectory = wp;
  // Building corner off the map origin; all walls sit on a 0.2 m lattice otherwise.
  translate(sc, {0.1, 0.07, 0.13});
  return sc;
}

Scene warehouse_preset(Rng& rng) {
  Scene sc;
  sc.spec.bounds = box(0, 0, 0, 20, 14, 4);
  add_shell(sc.spec);
  // Four full-height rack rows, each split by a cross aisle at x 9..11. The explorer
  // runs the aisles as a serpentine, then the east column, cross aisle and west column.
  for (double y : {2.6, 5.4, 8.2, 11.0}) {
    sc.spec.obstacles.push_back(box(3.0, y, 0.4, 9.0, y + 1.0, 3.6));
    sc.spec.obstacles.push_back(box(11.0, y, 0.4, 17.0, y + 1.0, 3.6));
  }
  const double z = 2.0;
  std::vector<Point3> wp{{1.5, 1.5, z},  {18.5, 1.5, z},  {18.5, 4.5, z}, {1.5, 4.5, z},
                         {1.5, 7.3, z},  {18.5, 7.3, z},  {18.5, 10.1, z}, {1.5, 10.1, z},
                         {1.5, 12.8, z}, {18.5, 12.8, z}, {18.5, 1.5, z},  {10.0, 1.5, z},
                         {10.0, 12.8, z}, {1.5, 12.8, z},  {1.5, 1.5, z}};
  jitter(wp, 0.1, rng);
  sc.trajectory = wp;
  return sc;
}

Scene open_space_preset(Rng& rng) {
  Scene sc;
  sc.spec.bounds = box(0, 0, 0, 18, 18, 3.5);
  add_shell(sc.spec);
  for (int n = 0; n < 4; ++n) {
    const double sx = 0.8 + 1.2 * uniform_unit(rng);
    const double sy = 0.8 + 1.2 * uniform_unit(rng);
    const double x = 5.0 + (8.0 - sx) * uniform_unit(rng);
    const double y = 5.0 + (8.0 - sy) * uniform_unit(rng);
    const double h = 0.4 + 0.8 + 2.0 * uniform_unit(rng);
    sc.spec.obstacles.push_back(box(x, y, 0.4, x + sx, y + sy, h));
  }
  const double z = 1.75;
  std::vector<Point3> wp{{2, 2, z}, {16, 2, z}, {16, 16, z}, {2, 16, z}, {2, 2.4, z}};
  jitter(wp, 0.2, rng);
  sc.trajectory = wp;
  return sc;
}

Scene pillars_preset(Rng& rng) {
  Scene sc;
  sc.spec.bounds = box(0, 0, 0, 9, 9, 5);
  add_shell(sc.spec);
  for (double cx : {3.3, 4.5, 5.7})
    for (double cy : {3.3, 4.5, 5.7}) {
      sc.spec.obstacles.push_back(box(cx - 0.2, cy - 0.2, 0.4, cx + 0.2, cy + 0.2, 4.6));
    }
  const double z = 2.5;
  std::vector<Point3> wp{{1.4, 1.4, z}, {7.6, 1.4, z}, {7.6, 7.6, z}, {1.4, 7.6, z}, {1.4, 1.8, z}};
  jitter(wp, 0.05, rng);
  sc.trajectory = wp;
  return sc;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"office", "warehouse", "open_space", "pillars", "two_room", "corridor"};
  return names;
}

Scene build_preset(const std::string& name, double bounds_scale, Rng& rng) {
  if (!(bounds_scale > 0.0)) throw Error(ErrorCode::Usage, "bounds_scale must be positive");
  Scene sc;
  if (name == "office") {
    sc = office_preset(rng);
  } else if (name == "warehouse") {
    sc = warehouse_preset(rng);
  } else if (name == "open_space") {
    sc = open_space_preset(rng);
  } else if (name == "pillars") {
    sc = pillars_preset(rng);
  } else if (name == "two_room") {
    sc = two_room_preset(rng);
  } else if (name == "corridor") {
    sc = corridor_preset(rng);
  } else {
    std::string all;
    for (const auto& n : preset_names()) all += (all.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::Usage, "unknown preset '" + name + "' (available: " + all + ")");
  }
  sc.spec.preset_name = name;
  auto scale = [&](Point3& p) { p = p * bounds_scale; };
  scale(sc.spec.bounds.min);
  scale(sc.spec.bounds.max);
  for (auto& b : sc.spec.obstacles) {
    scale(b.min);
    scale(b.max);
  }
  for (auto& p : sc.trajectory) scale(p);
  sc.trajectory = densify(sc.trajectory, 0.2 * bounds_scale);
  return sc;
}

OccupancyGrid rasterize(const SceneSpec& scene, double voxel_size) {
  OccupancyGrid occ(voxel_size);
  const VoxelIndex lo{static_cast<int>(std::ceil(scene.bounds.min.x / voxel_size - 0.5)),
                      static_cast<int>(std::ceil(scene.bounds.min.y / voxel_size - 0.5)),
                      static_cast<int>(std::ceil(scene.bounds.min.z / voxel_size - 0.5))};
  const VoxelIndex hi{static_cast<int>(std::floor(scene.bounds.max.x / voxel_size - 0.5)),
                      static_cast<int>(std::floor(scene.bounds.max.y / voxel_size - 0.5)),
                      static_cast<int>(std::floor(scene.bounds.max.z / voxel_size - 0.5))};
  for (int k = lo.k; k <= hi.k; ++k)
    for (int j = lo.j; j <= hi.j; ++j)
      for (int i = lo.i; i <= hi.i; ++i) {
        const VoxelIndex v{i, j, k};
        const Point3 c = voxel_center(v, voxel_size);
        const bool hit = std::any_of(scene.obstacles.begin(), scene.obstacles.end(),
                                     [&](const Box3& b) { return b.contains(c); });
        occ.set(v, hit ? VoxelState::Occupied : VoxelState::Free);
      }
  return occ;
}

double ray_box_hit(const Point3& origin, const Point3& dir, const Box3& b) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int ax = 0; ax < 3; ++ax) {
    if (dir[ax] == 0.0) {
      if (origin[ax] < b.min[ax] || origin[ax] > b.max[ax]) return -1.0;
      continue;
    }
    double t1 = (b.min[ax] - origin[ax]) / dir[ax];
    double t2 = (b.max[ax] - origin[ax]) / dir[ax];
    if (t1 > t2) std::swap(t1, t2);
    t_near = std::max(t_near, t1);
    t_far = std::min(t_far, t2);
  }
  if (t_near > t_far || t_far < 0.0 || t_near < 0.0) return -1.0;
  return t_near;
}

SlamMap simulate_observations(const SceneSpec& scene, const std::vector<Point3>& trajectory,
                              const ObservationModel& model) {
  if (!(model.max_range > 0.0) || model.rays_per_pose == 0 || model.landmark_noise_sigma < 0.0) {
    throw Error(ErrorCode::Usage, "invalid observation model");
  }
  Rng rng(model.rng_seed);
  SlamMap map;
  map.trajectory = trajectory;
  for (const auto& pose : trajectory) {
    for (std::size_t r = 0; r < model.rays_per_pose; ++r) {
      const double z = 2.0 * uniform_unit(rng) - 1.0;
      const double phi = 2.0 * M_PI * uniform_unit(rng);
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Point3 dir{s * std::cos(phi), s * std::sin(phi), z};
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : scene.obstacles) {
        const double t = ray_box_hit(pose, dir, b);
        if (t > 0.0 && t < best) best = t;
      }
      if (!(best <= model.max_range)) continue;
      Point3 landmark = pose + dir * best;
      if (model.landmark_noise_sigma > 0.0) {
        landmark += Point3{standard_normal(rng), standard_normal(rng), standard_normal(rng)} *
                    model.landmark_noise_sigma;
      }
      if (distance(landmark, pose) > 0.0) map.observations.push_back({pose, landmark});
    }
  }
  return map;
}

GridPath grid_astar(const DenseOccupancy& occ, const Point3& a, const Point3& b) {
  const double vs = occ.voxel_size();
  const VoxelIndex va = world_to_voxel(a, vs), vb = world_to_voxel(b, vs);
  if (!occ.is_free(va) || !occ.is_free(vb)) throw Error(ErrorCode::Generic, "grid_astar: endpoint voxel is not Free");

  const VoxelIndex lo = occ.lo(), dims = occ.dims();
  const std::size_t total = static_cast<std::size_t>(dims.i) * dims.j * dims.k;
  auto offset = [&](const VoxelIndex& v) {
    return (static_cast<std::size_t>(v.k - lo.k) * dims.j + (v.j - lo.j)) * dims.i + (v.i - lo.i);
  };
  auto index_of = [&](std::size_t off) {
    const int i = static_cast<int>(off % dims.i);
    const int j = static_cast<int>((off / dims.i) % dims.j);
    const int k = static_cast<int>(off / (static_cast<std::size_t>(dims.i) * dims.j));
    return VoxelIndex{lo.i + i, lo.j + j, lo.k + k};
  };
  const Point3 goal = voxel_center(vb, vs);
  const double step_cost[4] = {0.0, vs, vs * std::sqrt(2.0), vs * std::sqrt(3.0)};

  std::vector<double> g(total, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(total, -1);
  std::vector<char> closed(total, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  const std::size_t start = offset(va), target = offset(vb);
  g[start] = 0.0;
  open.push({distance(voxel_center(va, vs), goal), start});
  GridPath path;
  while (!open.empty()) {
    const std::size_t u = open.top().second;
    open.pop();
    if (closed[u]) continue;
    closed[u] = 1;
    ++path.expanded;
    if (u == target) break;
    const VoxelIndex vu = index_of(u);
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj)
        for (int dk = -1; dk <= 1; ++dk) {
          const int moved = (di != 0) + (dj != 0) + (dk != 0);
          if (moved == 0) continue;
          const VoxelIndex vn{vu.i + di, vu.j + dj, vu.k + dk};
          if (!occ.is_free(vn)) continue;
          const std::size_t n = offset(vn);
          if (closed[n]) continue;
          const double cand = g[u] + step_cost[moved];
          if (cand < g[n]) {
            g[n] = cand;
            parent[n] = static_cast<std::int64_t>(u);
            open.push({cand + distance(voxel_center(vn, vs), goal), n});
          }
        }
  }
  if (!closed[target]) throw Error(ErrorCode::NoPath, "grid_astar: goal unreachable");
  for (std::int64_t u = static_cast<std::int64_t>(target); u != -1; u = parent[u]) {
    path.waypoints.push_back(voxel_center(index_of(static_cast<std::size_t>(u)), vs));
  }
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  path.length = g[target];
  return path;
}

GridPath grid_astar(const OccupancyGrid& occ, const Point3& a, const Point3& b) {
  return grid_astar(DenseOccupancy(occ), a, b);
}

CaptureRatio captured_space_ratio(const OccupancyGrid& test, const OccupancyGrid& reference) {
  if (std::abs(test.voxel_size() - reference.voxel_size()) > 1e-12) {
    throw Error(ErrorCode::Usage, "captured_space_ratio: voxel size mismatch");
  }
  std::size_t ref_free = 0, ref_occ = 0, got_free = 0, got_occ = 0;
  for (const auto& [v, s] : reference.states()) {
    const VoxelState t = test.state(v);
    if (s == VoxelState::Free) {
      ++ref_free;
      if (t == VoxelState::Free) ++got_free;
    } else {
      ++ref_occ;
      if (t != VoxelState::Free) ++got_occ;
    }
  }
  CaptureRatio r;
  r.free_captured = ref_free ? static_cast<double>(got_free) / ref_free : 0.0;
  r.occupied_captured = ref_occ ? static_cast<double>(got_occ) / ref_occ : 0.0;
  return r;
}

std::vector<BenchmarkRecord> benchmark_planners(const TopologicalMap& topo, const NavGraph& nav,
                                                const OccupancyGrid& occ, std::size_t n_queries,
                                                Rng& rng) {
  const double vs = topo.voxel_size;
  std::vector<VoxelIndex> pool;
  for (const auto& c : topo.vertices) pool.insert(pool.end(), c.voxels.begin(), c.voxels.end());
  std::sort(pool.begin(), pool.end());
  if (pool.empty()) throw Error(ErrorCode::Generic, "benchmark: topological map has no voxels");
  const DenseOccupancy dense(occ);

  using clock = std::chrono::steady_clock;
  std::vector<BenchmarkRecord> records;
  const std::size_t max_draws = 100 * std::max<std::size_t>(n_queries, 1);
  for (std::size_t draw = 0; draw < max_draws && records.size() < n_queries; ++draw) {
    BenchmarkRecord r;
    r.a = voxel_center(pool[uniform_index(rng, pool.size())], vs);
    r.b = voxel_center(pool[uniform_index(rng, pool.size())], vs);
    r.direct_m = distance(r.a, r.b);
    if (r.direct_m <= 2.0 * vs) continue;

    GridPath grid;
    const auto g0 = clock::now();
    try {
      grid = grid_astar(dense, r.a, r.b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoPath) continue;
      throw;
    }
    const auto g1 = clock::now();
    const PlanResult topo_path = plan(topo, nav, r.a, r.b);
    const auto t1 = clock::now();

    r.grid_m = grid.length;
    r.topo_m = topo_path.length;
    r.grid_time_us = std::chrono::duration<double, std::micro>(g1 - g0).count();
    r.topo_time_us = std::chrono::duration<double, std::micro>(t1 - g1).count();
    r.topo_norm = r.topo_m / r.direct_m;
    r.grid_norm = r.grid_m / r.direct_m;
    records.push_back(r);
  }
  if (records.size() < n_queries) {
    throw Error(ErrorCode::Generic, "benchmark: only " + std::to_string(records.size()) + " of " +
                                        std::to_string(n_queries) + " solvable queries found");
  }
  return records;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << "query,direct_m,topo_m,grid_m,topo_norm,grid_norm,topo_time_us,grid_time_us\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << i << ',' << format_fixed(r.direct_m) << ',' << format_fixed(r.topo_m) << ','
        << format_fixed(r.grid_m) << ',' << format_fixed(r.topo_norm) << ',' << format_fixed(r.grid_norm)
        << ',' << format_fixed(r.topo_time_us, 3) << ',' << format_fixed(r.grid_time_us, 3) << '\n';
  }
}

void write_scene(std::ostream& out, const SceneSpec& scene) {
  auto put = [&](char tag, const Box3& b) {
    out << tag << ' ' << format_fixed(b.min.x) << ' ' << format_fixed(b.min.y) << ' ' << format_fixed(b.min.z)
        << ' ' << format_fixed(b.max.x) << ' ' << format_fixed(b.max.y) << ' ' << format_fixed(b.max.z) << '\n';
  };
  out << "SCENE v1 " << scene.preset_name << '\n';
  put('B', scene.bounds);
  for (const auto& b : scene.obstacles) put('X', b);
}

SceneSpec read_scene(std::istream& in) {
  std::string line;
  SceneSpec s;
  if (!std::getline(in, line) || line.rfind("SCENE v1 ", 0) != 0) {
    throw Error(ErrorCode::Format, "scene: missing SCENE v1 header");
  }
  s.preset_name = line.substr(9);
  bool have_bounds = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    char tag = 0;
    Box3 b;
    if (!(ss >> tag >> b.min.x >> b.min.y >> b.min.z >> b.max.x >> b.max.y >> b.max.z) || (tag != 'B' && tag != 'X')) {
      throw Error(ErrorCode::Format, "scene line " + std::to_string(line_no) + ": malformed");
    }
    if (tag == 'B') {
      s.bounds = b;
      have_bounds = true;
    } else {
      s.obstacles.push_back(b);
    }
  }
  if (!have_bounds || !(s.bounds.volume() > 0)) throw Error(ErrorCode::Format, "scene: missing or empty bounds");
  return s;
}

}  // namespace topomap
