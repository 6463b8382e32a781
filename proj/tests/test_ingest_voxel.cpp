#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"

using namespace topomap;

namespace {

SlamMap parse(const std::string& text) {
  std::istringstream in(text);
  return parse_slam_map(in);
}

ErrorCode parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Generic;
}

}  // namespace

TEST_CASE("parse minimal map") {
  const SlamMap m = parse("T 0 0 0\nO 0 0 0 1 0 0\n");
  CHECK(m.observations.size() == 1);
  CHECK(m.trajectory.size() == 1);
  CHECK(m.observations[0].landmark == Point3{1, 0, 0});
}

TEST_CASE("parse rejects bad input") {
  CHECK(parse_error("T 0 0 0\nO 1 1 1 1 1 1\n") == ErrorCode::Format);
  CHECK(parse_error("T 1.0 2.0\n") == ErrorCode::Format);
  CHECK(parse_error("O 0 0 0 1 0 0\n") == ErrorCode::Format);  // no trajectory
  CHECK(parse_error("T 0 0 nan\n") == ErrorCode::Format);
  CHECK(parse_error("Q 0 0 0\n") == ErrorCode::Format);
}

TEST_CASE("malformed line is named in the message") {
  try {
    parse("# header\nT 0 0 0\nT 1.0 2.0\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("comments and timestamps are accepted") {
  const SlamMap m = parse("# c\nT 0 0 0 12.5\n\nT 1 0 0 13\n");
  CHECK(m.trajectory.size() == 2);
}

TEST_CASE("write then parse round trips") {
  SlamMap m;
  m.trajectory = {{0.5, -1.25, 2}, {1, 2, 3}};
  m.observations = {{{0, 0, 0}, {1.5, 0.25, -0.75}}};
  std::ostringstream out;
  write_slam_map(out, m);
  CHECK(parse(out.str()) == m);
}

TEST_CASE("stats") {
  SlamMap m;
  m.trajectory = {{0, 0, 0}, {3, 4, 0}};
  CHECK(slam_map_stats(m).trajectory_length_m == doctest::Approx(5.0));

  SlamMap single;
  single.trajectory = {{1, 2, 3}};
  const auto s = slam_map_stats(single);
  CHECK(s.trajectory_length_m == 0.0);
  CHECK(s.bounding_box.min == Point3{1, 2, 3});
  CHECK(s.bounding_box.max == Point3{1, 2, 3});

  SlamMap two;
  two.trajectory = {{0, 0, 0}};
  two.observations = {{{0, 0, 0}, {1, 0, 0}}, {{0, 0, 0}, {-1, 0, 0}}};
  const auto t = slam_map_stats(two);
  CHECK(t.observation_count == 2);
  CHECK(t.bounding_box.min.x == -1.0);
  CHECK(t.bounding_box.max.x == 1.0);
}

TEST_CASE("world_to_voxel") {
  CHECK(world_to_voxel({0.1, 0.1, 0.1}, 0.25) == VoxelIndex{0, 0, 0});
  CHECK(world_to_voxel({-0.1, 0.0, 0.6}, 0.25) == VoxelIndex{-1, 0, 2});
  CHECK(world_to_voxel({0.25, 0, 0}, 0.25) == VoxelIndex{1, 0, 0});
}

TEST_CASE("traverse_ray examples") {
  const auto axis = traverse_ray({0.125, 0.125, 0.125}, {1.125, 0.125, 0.125}, 0.25);
  CHECK(axis == std::vector<VoxelIndex>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});

  CHECK(traverse_ray({0.01, 0.02, 0.03}, {0.2, 0.1, 0.05}, 0.25).size() == 1);

  const Point3 a{0.1, 0.1, 0.1}, b{0.4, 0.4, 0.1};
  const auto diag = traverse_ray(a, b, 0.25);
  CHECK(diag.size() == 3);
  CHECK(diag.front() == VoxelIndex{0, 0, 0});
  CHECK(diag.back() == VoxelIndex{1, 1, 0});
  // The segment passes exactly through the corner at (0.25, 0.25): sampling only sees the two
  // diagonal voxels, the face-connected walk adds the x-side neighbour.
  const auto sampled = oracle::sampled_voxels(a, b, 0.25, 1e-4);
  std::set<VoxelIndex> walked(diag.begin(), diag.end());
  CHECK(std::includes(walked.begin(), walked.end(), sampled.begin(), sampled.end()));
  CHECK(diag[1] == VoxelIndex{1, 0, 0});

  // Nudged off the corner, the walk and the sampled set agree exactly.
  const Point3 c{0.1, 0.11, 0.1}, d{0.4, 0.41, 0.1};
  const auto off = traverse_ray(c, d, 0.25);
  CHECK(std::set<VoxelIndex>(off.begin(), off.end()) == oracle::sampled_voxels(c, d, 0.25, 1e-4));
}

TEST_CASE("traverse_ray is face connected and matches the slab oracle") {
  Rng rng(11);
  for (int n = 0; n < 300; ++n) {
    auto coord = [&] { return -2.0 + 4.0 * uniform_unit(rng); };
    const Point3 a{coord(), coord(), coord()}, b{coord(), coord(), coord()};
    const auto walk = traverse_ray(a, b, 0.3);
    for (std::size_t i = 1; i < walk.size(); ++i) {
      const VoxelIndex d = walk[i] - walk[i - 1];
      CHECK(std::abs(d.i) + std::abs(d.j) + std::abs(d.k) == 1);
    }
    CHECK(std::set<VoxelIndex>(walk.begin(), walk.end()) == oracle::slab_voxels(a, b, 0.3));
  }
}

TEST_CASE("traverse_ray rejects zero-length segments") {
  CHECK_THROWS_AS(traverse_ray({1, 1, 1}, {1, 1, 1}, 0.25), Error);
}

TEST_CASE("closed center segment is symmetric and matches box tests") {
  Rng rng(5);
  for (int n = 0; n < 300; ++n) {
    auto c = [&] { return static_cast<int>(uniform_index(rng, 9)) - 4; };
    const VoxelIndex a{c(), c(), c()}, b{c(), c(), c()};
    std::set<VoxelIndex> fwd, bwd, brute;
    walk_center_segment(a, b, [&](const VoxelIndex& v) { return fwd.insert(v), true; });
    walk_center_segment(b, a, [&](const VoxelIndex& v) { return bwd.insert(v), true; });
    for (int i = std::min(a.i, b.i); i <= std::max(a.i, b.i); ++i)
      for (int j = std::min(a.j, b.j); j <= std::max(a.j, b.j); ++j)
        for (int k = std::min(a.k, b.k); k <= std::max(a.k, b.k); ++k)
          if (oracle::center_segment_touches(a, b, {i, j, k})) brute.insert({i, j, k});
    CHECK(fwd == bwd);
    CHECK(fwd == brute);
  }
}
