#include "topomap/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <istream>
#include <ostream>

namespace topomap {
namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::Usage, "config: '" + key + "' expects a real, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::Usage, "config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename F>
auto timed(std::vector<StageTiming>& timings, const std::string& stage, F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto result = fn();
    timings.push_back({stage, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()});
    return result;
  } catch (const Error& e) {
    throw Error(e.code(), stage + ": " + e.what());
  }
}

}  // namespace

TsdfConfig PipelineConfig::tsdf() const {
  return {truncation_distance, max_ray_length, occupancy_threshold_fraction, min_component_size};
}

GrowConfig PipelineConfig::grow() const { return {compactness_fraction, resolved_delta_margin(), seed}; }

MergeConfig PipelineConfig::merge() const { return {obstacle_ratio_threshold, seed}; }

ObservationModel PipelineConfig::observation_model() const {
  return {max_ray_length, rays_per_pose, landmark_noise_sigma, seed};
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "voxel_size") {
    voxel_size = parse_double(key, value);
  } else if (key == "truncation_distance") {
    truncation_distance = parse_double(key, value);
  } else if (key == "max_ray_length") {
    max_ray_length = parse_double(key, value);
  } else if (key == "occupancy_threshold_fraction") {
    occupancy_threshold_fraction = parse_double(key, value);
  } else if (key == "min_component_size") {
    min_component_size = parse_uint(key, value);
  } else if (key == "compactness_fraction") {
    compactness_fraction = parse_double(key, value);
  } else if (key == "delta_margin") {
    delta_margin = parse_double(key, value);
  } else if (key == "obstacle_ratio_threshold") {
    obstacle_ratio_threshold = parse_double(key, value);
  } else if (key == "seed") {
    seed = parse_uint(key, value);
  } else if (key == "rays_per_pose") {
    rays_per_pose = parse_uint(key, value);
  } else if (key == "landmark_noise_sigma") {
    landmark_noise_sigma = parse_double(key, value);
  } else if (key == "bounds_scale") {
    bounds_scale = parse_double(key, value);
  } else if (key == "carve_trajectory") {
    if (value == "true" || value == "1") {
      carve_trajectory = true;
    } else if (value == "false" || value == "0") {
      carve_trajectory = false;
    } else {
      throw Error(ErrorCode::Usage, "config: 'carve_trajectory' expects true/false");
    }
  } else {
    throw Error(ErrorCode::Usage, "config: unknown key '" + key + "'");
  }
}

void PipelineConfig::validate() const {
  if (!(voxel_size > 0.0)) throw Error(ErrorCode::Usage, "config: voxel_size must be > 0");
  tsdf().validate();
  grow().validate();
  merge().validate();
  if (rays_per_pose == 0) throw Error(ErrorCode::Usage, "config: rays_per_pose must be > 0");
  if (landmark_noise_sigma < 0.0) throw Error(ErrorCode::Usage, "config: landmark_noise_sigma must be >= 0");
  if (!(bounds_scale > 0.0)) throw Error(ErrorCode::Usage, "config: bounds_scale must be > 0");
}

PipelineConfig load_config(std::istream& in) {
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Usage, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void print_config(std::ostream& out, const PipelineConfig& cfg) {
  out << "voxel_size = " << format_fixed(cfg.voxel_size) << '\n'
      << "truncation_distance = " << format_fixed(cfg.truncation_distance) << '\n'
      << "max_ray_length = " << format_fixed(cfg.max_ray_length) << '\n'
      << "occupancy_threshold_fraction = " << format_fixed(cfg.occupancy_threshold_fraction) << '\n'
      << "min_component_size = " << cfg.min_component_size << '\n'
      << "compactness_fraction = " << format_fixed(cfg.compactness_fraction) << '\n'
      << "delta_margin = " << format_fixed(cfg.resolved_delta_margin()) << '\n'
      << "obstacle_ratio_threshold = " << format_fixed(cfg.obstacle_ratio_threshold) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "rays_per_pose = " << cfg.rays_per_pose << '\n'
      << "landmark_noise_sigma = " << format_fixed(cfg.landmark_noise_sigma) << '\n'
      << "bounds_scale = " << format_fixed(cfg.bounds_scale) << '\n'
      << "carve_trajectory = " << (cfg.carve_trajectory ? "true" : "false") << '\n';
}

OccupancyGrid sparse_occupancy(const SlamMap& map, const PipelineConfig& cfg, double voxel_size) {
  const TsdfConfig tc = cfg.tsdf();
  const TsdfGrid tsdf = integrate_slam_map(map, tc, voxel_size);
  return filter_small_components(binarize(tsdf, tc), tc.min_component_size);
}

BuildResult build_topomap(const SlamMap& map, const PipelineConfig& cfg) {
  cfg.validate();
  BuildResult r;
  const double vs = cfg.voxel_size;
  const TsdfConfig tc = cfg.tsdf();
  r.tsdf = timed(r.timings, "tsdf", [&] { return integrate_slam_map(map, tc, vs); });
  r.occupancy = timed(r.timings, "binarize", [&] {
    return filter_small_components(binarize(r.tsdf, tc), tc.min_component_size);
  });
  if (cfg.carve_trajectory) {
    r.occupancy = timed(r.timings, "carve", [&] { return carve_trajectory(r.occupancy, map.trajectory); });
  }
  if (r.occupancy.count(VoxelState::Free) == 0) throw Error(ErrorCode::Generic, "occupancy: no free space");
  r.grown = timed(r.timings, "grow", [&] { return grow_all(r.occupancy, map.trajectory, cfg.grow()); });
  r.portals_before_merge = extract_portals(r.grown, vs).size();
  r.merged = timed(r.timings, "merge", [&] {
    return merge_all(r.occupancy, r.grown, cfg.merge(), &r.merge_stats);
  });
  r.topo = timed(r.timings, "portals", [&] { return make_topological_map(r.merged, vs); });
  return r;
}

}  // namespace topomap
