#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"

using namespace topomap;

namespace {

Box3 box(double x0, double y0, double z0, double x1, double y1, double z1) { return {{x0, y0, z0}, {x1, y1, z1}}; }

OccupancyGrid free_line(int n) {
  OccupancyGrid occ(0.25);
  for (int i = 0; i < n; ++i) occ.set({i, 0, 0}, VoxelState::Free);
  return occ;
}

}  // namespace

TEST_CASE("presets are deterministic and keep the trajectory in free space") {
  for (const auto& name : preset_names()) {
    Rng r1(7), r2(7);
    const Scene a = build_preset(name, 1.0, r1), b = build_preset(name, 1.0, r2);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.spec.obstacles.size() == b.spec.obstacles.size());
    CHECK(a.spec.preset_name == name);
    for (const auto& p : a.trajectory) {
      CHECK(a.spec.bounds.contains(p));
      for (const auto& o : a.spec.obstacles) CHECK_FALSE(o.contains(p));
    }
  }
  Rng rng(0);
  CHECK_THROWS_AS(build_preset("moon_base", 1.0, rng), Error);
}

TEST_CASE("pillars trajectory stays on the perimeter") {
  Rng rng(0);
  const Scene sc = build_preset("pillars", 1.0, rng);
  Box3 field{{1e9, 1e9, 1e9}, {-1e9, -1e9, -1e9}};
  std::size_t pillars = 0;
  for (const auto& o : sc.spec.obstacles) {
    if (o.max.x - o.min.x > 1.0 || o.max.y - o.min.y > 1.0) continue;  // shell walls
    field.expand(o.min);
    field.expand(o.max);
    ++pillars;
  }
  CHECK(pillars >= 4);
  for (const auto& p : sc.trajectory) {
    const bool inside_xy = p.x > field.min.x && p.x < field.max.x && p.y > field.min.y && p.y < field.max.y;
    CHECK_FALSE(inside_xy);
  }
}

TEST_CASE("bounds scale stretches the scene") {
  Rng r1(0), r2(0);
  const Scene a = build_preset("two_room", 1.0, r1), b = build_preset("two_room", 2.0, r2);
  CHECK(b.spec.bounds.max.x == doctest::Approx(2.0 * a.spec.bounds.max.x));
  Rng r3(0);
  CHECK_THROWS_AS(build_preset("two_room", 0.0, r3), Error);
}

TEST_CASE("rasterize") {
  SceneSpec s;
  s.bounds = box(0, 0, 0, 2, 2, 2);
  const OccupancyGrid empty = rasterize(s, 0.25);
  CHECK(empty.count(VoxelState::Free) == 512);
  CHECK(empty.count(VoxelState::Occupied) == 0);

  s.obstacles = {box(0, 0, 0, 2, 2, 2)};
  CHECK(rasterize(s, 0.25).count(VoxelState::Occupied) == 512);

  s.obstacles = {box(0, 0, 0, 1, 1, 1)};
  CHECK(rasterize(s, 0.25).count(VoxelState::Occupied) == 64);
}

TEST_CASE("observation simulation") {
  SceneSpec open;
  open.bounds = box(0, 0, 0, 4, 4, 4);
  CHECK(simulate_observations(open, {{2, 2, 2}}, ObservationModel{}).observations.empty());

  SceneSpec wall;
  wall.bounds = box(0, 0, 0, 4, 4, 4);
  wall.obstacles = {box(3, -100, -100, 3.5, 100, 100)};
  ObservationModel exact;
  exact.landmark_noise_sigma = 0.0;
  exact.rays_per_pose = 200;
  const SlamMap m = simulate_observations(wall, {{2, 2, 2}}, exact);
  REQUIRE_FALSE(m.observations.empty());
  for (const auto& o : m.observations) CHECK(o.landmark.x == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("doubling rays doubles the observation count") {
  Rng rng(0);
  const Scene sc = build_preset("office", 1.0, rng);
  double single = 0, doubled = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ObservationModel m;
    m.rng_seed = seed;
    m.rays_per_pose = 20;
    single += double(simulate_observations(sc.spec, sc.trajectory, m).observations.size());
    m.rays_per_pose = 40;
    doubled += double(simulate_observations(sc.spec, sc.trajectory, m).observations.size());
  }
  CHECK(doubled / single == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("ray box hit") {
  const Box3 b = box(1, -1, -1, 2, 1, 1);
  CHECK(ray_box_hit({0, 0, 0}, {1, 0, 0}, b) == doctest::Approx(1.0));
  CHECK(ray_box_hit({0, 0, 0}, {-1, 0, 0}, b) < 0.0);
}

TEST_CASE("grid astar") {
  const OccupancyGrid line = free_line(12);
  const GridPath p = grid_astar(line, voxel_center({0, 0, 0}, 0.25), voxel_center({10, 0, 0}, 0.25));
  CHECK(p.length == doctest::Approx(10 * 0.25));
  CHECK(p.waypoints.size() == 11);

  OccupancyGrid shell = free_line(3);
  for (int i = 5; i <= 7; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) shell.set({i, j, k}, (i == 6 && j == 0 && k == 0) ? VoxelState::Free : VoxelState::Occupied);
  try {
    grid_astar(shell, voxel_center({0, 0, 0}, 0.25), voxel_center({6, 0, 0}, 0.25));
    FAIL("expected no path");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoPath);
  }
  CHECK_THROWS_AS(grid_astar(shell, voxel_center({0, 0, 0}, 0.25), voxel_center({5, 0, 0}, 0.25)), Error);
}

TEST_CASE("grid astar equals Dijkstra on random small grids") {
  Rng rng(12);
  for (int g = 0; g < 10; ++g) {
    OccupancyGrid occ(0.2);
    const int n = 8 + int(uniform_index(rng, 8));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          occ.set({i, j, k}, uniform_unit(rng) < 0.7 ? VoxelState::Free : VoxelState::Occupied);
    std::vector<VoxelIndex> free;
    for (const auto& v : occ.sorted_indices())
      if (occ.is_free(v)) free.push_back(v);
    for (int q = 0; q < 10; ++q) {
      const VoxelIndex a = free[uniform_index(rng, free.size())], b = free[uniform_index(rng, free.size())];
      const double ref = oracle::grid_dijkstra(occ, a, b);
      if (!std::isfinite(ref)) {
        CHECK_THROWS_AS(grid_astar(occ, voxel_center(a, 0.2), voxel_center(b, 0.2)), Error);
        continue;
      }
      CHECK(grid_astar(occ, voxel_center(a, 0.2), voxel_center(b, 0.2)).length == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("captured space ratio") {
  SceneSpec s;
  s.bounds = box(0, 0, 0, 2, 2, 1);
  s.obstacles = {box(0, 0, 0, 1, 2, 1)};
  const OccupancyGrid ref = rasterize(s, 0.25);
  const CaptureRatio same = captured_space_ratio(ref, ref);
  CHECK(same.free_captured == 1.0);
  CHECK(same.occupied_captured == 1.0);

  const CaptureRatio none = captured_space_ratio(OccupancyGrid(0.25), ref);
  CHECK(none.free_captured == 0.0);
  CHECK(none.occupied_captured == 1.0);

  OccupancyGrid half(0.25);
  for (const auto& [v, st] : ref.states())
    if (st == VoxelState::Free && v.j < 4) half.set(v, VoxelState::Free);
  CHECK(captured_space_ratio(half, ref).free_captured == doctest::Approx(0.5));
}

TEST_CASE("benchmark records") {
  PipelineConfig cfg;
  Rng rng(0);
  const Scene sc = build_preset("open_space", 1.0, rng);
  const BuildResult r = build_topomap(simulate_observations(sc.spec, sc.trajectory, cfg.observation_model()), cfg);
  const NavGraph nav = build_nav_graph(r.topo);
  Rng brng(0);
  const auto recs = benchmark_planners(r.topo, nav, r.occupancy, 40, brng);
  CHECK(recs.size() == 40);
  double st = 0, sg = 0;
  const double slack = std::sqrt(3.0) * cfg.voxel_size;
  for (const auto& rec : recs) {
    CHECK(rec.direct_m > 2 * cfg.voxel_size);
    CHECK(rec.topo_m + slack >= rec.direct_m);
    CHECK(rec.grid_m + slack >= rec.direct_m);
    st += rec.topo_norm;
    sg += rec.grid_norm;
  }
  CHECK(st / sg >= 1.0);

  Rng b1(5), b2(5);
  std::ostringstream c1, c2;
  auto strip = [](std::vector<BenchmarkRecord> v) {
    for (auto& rec : v) rec.topo_time_us = rec.grid_time_us = 0;
    return v;
  };
  write_benchmark_csv(c1, strip(benchmark_planners(r.topo, nav, r.occupancy, 10, b1)));
  write_benchmark_csv(c2, strip(benchmark_planners(r.topo, nav, r.occupancy, 10, b2)));
  const std::string csv = c1.str();
  CHECK(csv == c2.str());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("scene file round trip") {
  Rng rng(0);
  const Scene sc = build_preset("office", 1.0, rng);
  std::stringstream s;
  write_scene(s, sc.spec);
  const SceneSpec back = read_scene(s);
  CHECK(back.preset_name == "office");
  REQUIRE(back.obstacles.size() == sc.spec.obstacles.size());
  CHECK(distance(back.bounds.max, sc.spec.bounds.max) < 1e-6);
  std::istringstream bad("junk\n");
  CHECK_THROWS_AS(read_scene(bad), Error);
}
