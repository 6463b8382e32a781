#pragma once

#include <iosfwd>
#include <vector>

#include "topomap/common.hpp"

namespace topomap {

/// One observer-position to landmark-position ray.
struct LandmarkObservation {
  Point3 observer;
  Point3 landmark;

  bool operator==(const LandmarkObservation&) const = default;
};

/// Sparse SLAM map: landmark observations plus the explorer trajectory (positions only).
struct SlamMap {
  std::vector<LandmarkObservation> observations;
  std::vector<Point3> trajectory;

  bool operator==(const SlamMap&) const = default;
};

struct SlamMapStats {
  std::size_t observation_count = 0;
  double trajectory_length_m = 0.0;
  Box3 bounding_box;
};

struct ParseOptions {
  bool allow_empty_observations = true;
};

/// Parses the line-record format:
///   T x y z [t]            trajectory pose, timestamp ignored
///   O ox oy oz lx ly lz    observation
///   # ...                  comment
/// Throws Error(Format) on malformed lines (message names the line number) and on invalid
/// content: empty trajectory, non-finite coordinates, zero-length rays.
SlamMap parse_slam_map(std::istream& in, const ParseOptions& options = {});

/// Writes the same format with 6 decimals per coordinate.
void write_slam_map(std::ostream& out, const SlamMap& map);

SlamMapStats slam_map_stats(const SlamMap& map);

}  // namespace topomap
