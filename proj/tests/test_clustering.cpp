#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"

using namespace topomap;

namespace {

constexpr double kVs = 0.25;

OccupancyGrid free_box(VoxelIndex lo, VoxelIndex hi) {
  OccupancyGrid occ(kVs);
  for (int i = lo.i; i <= hi.i; ++i)
    for (int j = lo.j; j <= hi.j; ++j)
      for (int k = lo.k; k <= hi.k; ++k) occ.set({i, j, k}, VoxelState::Free);
  return occ;
}

// Free interior [0, n) on every axis inside a one-voxel Occupied shell.
OccupancyGrid shelled_cube(int n) {
  OccupancyGrid occ(kVs);
  for (int i = -1; i <= n; ++i)
    for (int j = -1; j <= n; ++j)
      for (int k = -1; k <= n; ++k) {
        const bool in = i >= 0 && j >= 0 && k >= 0 && i < n && j < n && k < n;
        occ.set({i, j, k}, in ? VoxelState::Free : VoxelState::Occupied);
      }
  return occ;
}

bool all_free(const OccupancyGrid& occ, const std::vector<VoxelIndex>& vs) {
  return std::all_of(vs.begin(), vs.end(), [&](const VoxelIndex& v) { return occ.is_free(v); });
}

}  // namespace

TEST_CASE("seed selection") {
  OccupancyGrid occ = free_box({0, 0, 0}, {3, 0, 0});
  const std::vector<Point3> traj{{0.1, 0.1, 0.1}, {0.9, 0.1, 0.1}};
  VoxelSet clustered{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  Rng rng(1);
  CHECK_FALSE(seed_cluster(occ, traj, clustered, rng).has_value());
  clustered.erase({2, 0, 0});
  CHECK(seed_cluster(occ, traj, clustered, rng) == VoxelIndex{2, 0, 0});
  Rng r1(42), r2(42);
  CHECK(seed_cluster(occ, traj, {}, r1) == seed_cluster(occ, traj, {}, r2));
}

TEST_CASE("adjacent free candidates") {
  OccupancyGrid open = free_box({-2, -2, -2}, {3, 2, 2});
  CHECK(adjacent_free_candidates(open, make_cluster(0, {{0, 0, 0}}, kVs)).size() == 6);
  CHECK(adjacent_free_candidates(open, make_cluster(0, {{0, 0, 0}, {1, 0, 0}}, kVs)).size() == 10);
  OccupancyGrid lone(kVs);
  lone.set({0, 0, 0}, VoxelState::Free);
  CHECK(adjacent_free_candidates(lone, make_cluster(0, {{0, 0, 0}}, kVs)).empty());
}

TEST_CASE("compact filter") {
  const GrowConfig cfg{0.98, 2 * kVs, 0};
  const VoxelCluster one = make_cluster(0, {{0, 0, 0}}, kVs);
  const std::vector<VoxelIndex> far{{40, 0, 0}, {0, -9, 3}};
  CHECK(compact_filter(one, far, cfg, kVs) == far);

  // Discrete ball of radius 4 voxels: a candidate one voxel past the rim passes.
  std::vector<VoxelIndex> ball;
  for (int i = -4; i <= 4; ++i)
    for (int j = -4; j <= 4; ++j)
      for (int k = -4; k <= 4; ++k)
        if (i * i + j * j + k * k <= 16) ball.push_back({i, j, k});
  const VoxelCluster b = make_cluster(0, ball, kVs);
  CHECK(compact_filter(b, {{5, 0, 0}}, cfg, kVs).size() == 1);

  // 20x1x1 rod: r_min comes from the short axes, so the tip is rejected and the side kept.
  std::vector<VoxelIndex> rod;
  for (int i = 0; i < 20; ++i) rod.push_back({i, 0, 0});
  const VoxelCluster r = make_cluster(0, rod, kVs);
  CHECK(compact_radius(rod, 0.98, kVs) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(compact_filter(r, {{20, 0, 0}}, cfg, kVs).empty());
  CHECK(compact_filter(r, {{10, 1, 0}}, cfg, kVs).size() == 1);
}

TEST_CASE("convexity filter") {
  OccupancyGrid occ = free_box({-3, -3, 0}, {3, 3, 0});
  const VoxelCluster one = make_cluster(0, {{0, 0, 0}}, kVs);
  CHECK(convexity_filter(occ, one, {{1, 0, 0}}).size() == 1);

  // Wall at i = 1 except the j = 3 row; cluster spans j = 0..3 at i = 0.
  for (int j = -3; j <= 2; ++j) occ.set({1, j, 0}, VoxelState::Occupied);
  const VoxelCluster col = make_cluster(0, {{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {0, 3, 0}}, kVs);
  CHECK(convexity_filter(occ, col, {{2, 0, 0}}).empty());
}

TEST_CASE("convexity filter on an L-shaped room agrees with brute force") {
  // L: horizontal arm j in [0,2], i in [0,9]; vertical arm i in [0,2], j in [0,9].
  OccupancyGrid occ(kVs);
  for (int i = -1; i <= 10; ++i)
    for (int j = -1; j <= 10; ++j) {
      const bool in = (i >= 0 && i <= 9 && j >= 0 && j <= 2) || (i >= 0 && i <= 2 && j >= 0 && j <= 9);
      occ.set({i, j, 0}, in ? VoxelState::Free : VoxelState::Occupied);
    }
  std::vector<VoxelIndex> arm;
  for (int i = 0; i <= 9; ++i)
    for (int j = 0; j <= 2; ++j) arm.push_back({i, j, 0});
  const VoxelCluster c = make_cluster(0, arm, kVs);
  const VoxelIndex corner_far{2, 9, 0}, near{1, 3, 0};
  const auto kept = convexity_filter(occ, c, {corner_far, near});
  for (const VoxelIndex& cand : {corner_far, near}) {
    auto with = arm;
    with.push_back(cand);
    const bool convex = oracle::convexity_violations(occ, with) == 0;
    CHECK(convex == (std::find(kept.begin(), kept.end(), cand) != kept.end()));
  }
  CHECK(std::find(kept.begin(), kept.end(), corner_far) == kept.end());
}

TEST_CASE("grow cluster") {
  const GrowConfig cfg{0.98, 2 * kVs, 0};
  const OccupancyGrid cube = shelled_cube(11);
  const VoxelCluster c = grow_cluster(cube, {5, 5, 5}, cfg);
  CHECK(c.voxels.size() > 300);
  CHECK(all_free(cube, c.voxels));
  CHECK(oracle::convexity_violations(cube, c.voxels) == 0);
  CHECK(norm(c.centroid - voxel_center({5, 5, 5}, kVs)) < 0.5 * kVs);

  OccupancyGrid corridor(kVs);
  for (int i = -1; i <= 12; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k)
        corridor.set({i, j, k}, (j == 0 && k == 0 && i >= 0 && i <= 11) ? VoxelState::Free : VoxelState::Occupied);
  const VoxelCluster line = grow_cluster(corridor, {5, 0, 0}, cfg);
  CHECK(all_free(corridor, line.voxels));
  for (const auto& v : line.voxels) CHECK((v.j == 0 && v.k == 0));

  OccupancyGrid boxed = shelled_cube(1);
  CHECK(grow_cluster(boxed, {0, 0, 0}, cfg).voxels.size() == 1);
  CHECK_THROWS_AS(grow_cluster(boxed, {5, 5, 5}, cfg), Error);
}

TEST_CASE("grow_all covers the trajectory with disjoint convex clusters") {
  const GrowConfig cfg{0.98, 2 * kVs, 7};
  Rng rng(0);
  const Scene sc = build_preset("two_room", 1.0, rng);
  const OccupancyGrid occ = carve_trajectory(rasterize(sc.spec, kVs), sc.trajectory);
  const auto clusters = grow_all(occ, sc.trajectory, cfg);
  CHECK(clusters.size() >= 2);
  VoxelSet seen;
  for (const auto& c : clusters) {
    CHECK(all_free(occ, c.voxels));
    for (const auto& v : c.voxels) CHECK(seen.insert(v).second);
  }
  for (const auto& v : trajectory_voxels(sc.trajectory, kVs)) CHECK(seen.count(v) == 1);
}

TEST_CASE("line of free space is tiled exactly by the trajectory") {
  OccupancyGrid occ(kVs);
  std::vector<Point3> traj;
  for (int i = 0; i < 12; ++i) {
    occ.set({i, 0, 0}, VoxelState::Free);
    traj.push_back(voxel_center({i, 0, 0}, kVs));
  }
  const auto clusters = grow_all(occ, traj, GrowConfig{});
  std::size_t total = 0;
  for (const auto& c : clusters) total += c.voxels.size();
  CHECK(total == 12);
}

TEST_CASE("hull construction") {
  const std::vector<Point3> tet{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const ConvexHull t = compute_hull(tet);
  CHECK(t.faces.size() == 4);
  CHECK(t.vertices.size() == 4);
  CHECK(t.volume == doctest::Approx(1.0 / 6.0));
  CHECK(hull_contains(t, {0.25, 0.25, 0.25}));
  for (const auto& p : tet) CHECK(hull_contains(t, p));

  std::vector<Point3> cube;
  for (int m = 0; m < 8; ++m) cube.push_back({double(m & 1), double((m >> 1) & 1), double((m >> 2) & 1)});
  cube.push_back({0.5, 0.5, 0.5});
  const ConvexHull c = compute_hull(cube);
  CHECK(c.vertices.size() == 8);
  CHECK(c.faces.size() == 6);
  CHECK(c.volume == doctest::Approx(1.0));
  CHECK(hull_contains(c, {0.5, 0.5, 0.5}));
  CHECK_FALSE(hull_contains(c, {2.0, 0.5, 0.5}));

  const std::vector<Point3> line{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  const ConvexHull l = compute_hull(line);
  CHECK(l.inflated);
  for (const auto& p : line) CHECK(hull_contains(l, p));

  CHECK_THROWS(compute_hull(std::vector<Point3>{}));
}

TEST_CASE("voxel hull matches the point hull") {
  Rng rng(4);
  for (int n = 0; n < 20; ++n) {
    std::vector<VoxelIndex> vox;
    std::vector<Point3> pts;
    for (int m = 0; m < 40; ++m) {
      const VoxelIndex v{int(uniform_index(rng, 7)), int(uniform_index(rng, 7)), int(uniform_index(rng, 7))};
      vox.push_back(v);
      pts.push_back(voxel_center(v, kVs));
    }
    const ConvexHull a = compute_voxel_hull(vox, kVs), b = compute_hull(pts);
    CHECK(a.volume == doctest::Approx(b.volume).epsilon(1e-9));
    CHECK(a.vertices.size() == b.vertices.size());
    for (const auto& p : pts) CHECK(hull_contains(a, p));
  }
}

TEST_CASE("obstacle ratio") {
  OccupancyGrid occ = free_box({0, 0, 0}, {9, 9, 0});
  std::vector<VoxelIndex> slab;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) slab.push_back({i, j, 0});
  const ConvexHull h = compute_voxel_hull(slab, kVs);
  CHECK(obstacle_ratio(occ, h) == 0.0);
  occ.set({2, 3, 0}, VoxelState::Occupied);
  occ.set({7, 7, 0}, VoxelState::Occupied);
  occ.set({5, 0, 0}, VoxelState::Occupied);
  CHECK(obstacle_ratio(occ, h) == doctest::Approx(0.03));
  CHECK(obstacle_ratio(occ, h) == doctest::Approx(oracle::obstacle_ratio_direct(occ, h)));

  OccupancyGrid solid(kVs);
  for (const auto& v : slab) solid.set(v, VoxelState::Occupied);
  CHECK(obstacle_ratio(solid, h) == 1.0);
}

TEST_CASE("merge pass") {
  const OccupancyGrid open = free_box({0, 0, 0}, {7, 3, 3});
  std::vector<VoxelIndex> left, right;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) (i < 4 ? left : right).push_back({i, j, k});
  const std::vector<VoxelCluster> two{make_cluster(0, left, kVs), make_cluster(1, right, kVs)};
  Rng rng(0);
  const MergePassResult r = merge_pass(open, two, MergeConfig{0.05, 0}, rng);
  CHECK(r.merges == 1);
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].voxels.size() == 128);

  // Strict comparison: threshold 0 never merges, even at ratio 0.
  CHECK(merge_pass(open, two, MergeConfig{0.0, 0}, rng).merges == 0);

  const std::vector<VoxelCluster> apart{make_cluster(0, {{0, 0, 0}}, kVs), make_cluster(1, {{5, 0, 0}}, kVs)};
  const MergePassResult n = merge_pass(open, apart, MergeConfig{}, rng);
  CHECK(n.merges == 0);
  CHECK(n.clusters.size() == 2);

  const std::vector<VoxelCluster> single{make_cluster(0, left, kVs)};
  CHECK(merge_all(open, single, MergeConfig{}).size() == 1);
}

TEST_CASE("rooms joined by a doorway stay apart") {
  // Two 6x6x4 rooms, a 2-voxel wall between them, one 1x1 doorway.
  OccupancyGrid occ(kVs);
  std::vector<VoxelIndex> left, right;
  for (int i = -1; i <= 14; ++i)
    for (int j = -1; j <= 6; ++j)
      for (int k = -1; k <= 4; ++k) {
        const bool interior = j >= 0 && j < 6 && k >= 0 && k < 4;
        const bool room_a = interior && i >= 0 && i < 6, room_b = interior && i >= 8 && i < 14;
        const bool door = (i == 6 || i == 7) && j == 3 && k == 0;
        occ.set({i, j, k}, room_a || room_b || door ? VoxelState::Free : VoxelState::Occupied);
        if (room_a || door) left.push_back({i, j, k});
        if (room_b) right.push_back({i, j, k});
      }
  const std::vector<VoxelCluster> rooms{make_cluster(0, left, kVs), make_cluster(1, right, kVs)};
  REQUIRE(adjacent_cluster_pairs(rooms).size() == 1);
  std::vector<VoxelIndex> both = left;
  both.insert(both.end(), right.begin(), right.end());
  CHECK(oracle::obstacle_ratio_direct(occ, compute_voxel_hull(both, kVs)) > 0.05);
  Rng rng(0);
  CHECK(merge_pass(occ, rooms, MergeConfig{}, rng).merges == 0);
}

TEST_CASE("merge_all shrinks every pass and stops") {
  Rng rng(0);
  const Scene sc = build_preset("warehouse", 1.0, rng);
  const OccupancyGrid occ = carve_trajectory(rasterize(sc.spec, 0.3), sc.trajectory);
  const auto grown = grow_all(occ, sc.trajectory, GrowConfig{0.98, 0.6, 0});
  MergeStats st;
  const DenseOccupancy dense(occ);
  Rng mr(0);
  const auto merged = merge_all(dense, grown, MergeConfig{}, mr, &st);
  CHECK(merged.size() < grown.size());
  std::size_t prev = grown.size();
  for (std::size_t i = 0; i + 1 < st.clusters_after_pass.size(); ++i) {
    CHECK(st.clusters_after_pass[i] < prev);
    prev = st.clusters_after_pass[i];
  }
  CHECK(st.clusters_after_pass.back() == prev);
}
