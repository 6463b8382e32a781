// topomap command line: synth, build, plan, benchmark, eval-capture.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "topomap/pipeline.hpp"

namespace fs = std::filesystem;
using namespace topomap;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Format, "cannot open '" + path.string() + "' for reading");
  return in;
}

/// Writes through a string so a failing sink never leaves a partial file unnoticed.
void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Format, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::Format, "failed writing '" + path.string() + "'");
}

SlamMap load_slam_map(const fs::path& path, bool allow_empty) {
  auto in = open_in(path);
  return parse_slam_map(in, {allow_empty});
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void print_build_report(std::ostream& out, const BuildResult& r) {
  out << "stage timings [ms]:";
  for (const auto& t : r.timings) out << ' ' << t.stage << '=' << format_fixed(t.ms, 1);
  out << '\n'
      << "tsdf_voxels " << r.tsdf.size() << " (skipped rays " << r.tsdf.skipped_rays() << ")\n"
      << "occupied_voxels " << r.occupancy.count(VoxelState::Occupied) << '\n'
      << "free_voxels " << r.occupancy.count(VoxelState::Free) << '\n'
      << "clusters_before " << r.grown.size() << '\n'
      << "clusters_after " << r.merged.size() << '\n'
      << "merge_passes " << r.merge_stats.passes << '\n'
      << "portals_before " << r.portals_before_merge << '\n'
      << "portals_after " << r.topo.portals.size() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological maps from sparse SLAM landmarks"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> voxel_size;
  bool show_config = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "master random seed");
  app.add_option("--voxel-size", voxel_size, "voxel edge length [m]");
  app.add_flag("--print-config", show_config, "print the resolved configuration and exit");

  std::string preset, out_dir;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene, SLAM map and ground truth");
  synth->add_option("--preset", preset, "scene preset")->required();
  synth->add_option("--out", out_dir, "output directory")->required();

  std::string map_path, topomap_out, occupancy_dump, cluster_dump;
  auto* build = app.add_subcommand("build", "build a topological map from a SLAM map");
  build->add_option("--map", map_path, "SLAM map file")->required();
  build->add_option("--out", topomap_out, "topomap output file")->required();
  build->add_option("--dump-occupancy", occupancy_dump, "also write the occupancy dump");
  build->add_option("--dump-clusters", cluster_dump, "also write voxel -> cluster id");

  std::string plan_map;
  std::vector<double> coords;
  auto* plan_cmd = app.add_subcommand("plan", "plan a path between two points");
  plan_cmd->add_option("topomap", plan_map, "topomap file")->required();
  plan_cmd->add_option("coords", coords, "ax ay az bx by bz")->expected(6)->required();

  std::string scene_dir, csv_out;
  std::size_t n_queries = 100;
  auto* bench = app.add_subcommand("benchmark", "compare navigation-graph and grid A* planning");
  bench->add_option("--scene", scene_dir, "directory written by synth")->required();
  bench->add_option("-n", n_queries, "number of queries");
  bench->add_option("--out", csv_out, "CSV output")->required();

  std::string sizes_arg;
  auto* capture = app.add_subcommand("eval-capture", "captured free/occupied space per voxel size");
  capture->add_option("--scene", scene_dir, "directory written by synth")->required();
  capture->add_option("--voxel-sizes", sizes_arg, "comma separated voxel sizes [m]")->required();
  capture->add_option("--out", csv_out, "CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::Usage);
  }

  try {
    PipelineConfig cfg;
    if (!config_path.empty()) {
      auto in = open_in(config_path);
      cfg = load_config(in);
    }
    if (seed) cfg.seed = *seed;
    if (voxel_size) cfg.voxel_size = *voxel_size;
    cfg.validate();
    if (show_config) {
      print_config(std::cout, cfg);
      return 0;
    }

    if (*synth) {
      Rng rng(cfg.seed);
      const Scene scene = build_preset(preset, cfg.bounds_scale, rng);
      const SlamMap map = simulate_observations(scene.spec, scene.trajectory, cfg.observation_model());
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw Error(ErrorCode::Format, "cannot create '" + out_dir + "': " + ec.message());
      std::ostringstream slam, truth, spec;
      write_slam_map(slam, map);
      write_occupancy_dump(truth, rasterize(scene.spec, cfg.voxel_size));
      write_scene(spec, scene.spec);
      write_file(fs::path(out_dir) / "slam_map.txt", slam.str());
      write_file(fs::path(out_dir) / "ground_truth.grid", truth.str());
      write_file(fs::path(out_dir) / "scene.txt", spec.str());
      const SlamMapStats st = slam_map_stats(map);
      std::cout << "preset " << preset << '\n'
                << "observations " << st.observation_count << '\n'
                << "trajectory_poses " << map.trajectory.size() << '\n'
                << "trajectory_length_m " << format_fixed(st.trajectory_length_m, 3) << '\n';
      return 0;
    }

    if (*build) {
      const SlamMap map = load_slam_map(map_path, true);
      const BuildResult r = build_topomap(map, cfg);
      std::ostringstream topo;
      serialize_topomap(topo, r.topo);
      write_file(topomap_out, topo.str());
      if (!occupancy_dump.empty()) {
        std::ostringstream occ;
        write_occupancy_dump(occ, r.occupancy);
        write_file(occupancy_dump, occ.str());
      }
      if (!cluster_dump.empty()) {
        std::vector<std::pair<VoxelIndex, int>> owned(r.topo.owner.begin(), r.topo.owner.end());
        std::sort(owned.begin(), owned.end());
        std::ostringstream cl;
        cl << "# CLUSTERS v1 voxel_size=" << format_fixed(cfg.voxel_size) << '\n';
        for (const auto& [v, id] : owned) cl << v.i << ' ' << v.j << ' ' << v.k << ' ' << id << '\n';
        write_file(cluster_dump, cl.str());
      }
      print_build_report(std::cout, r);
      return 0;
    }

    if (*plan_cmd) {
      auto in = open_in(plan_map);
      const TopologicalMap topo = deserialize_topomap(in);
      const NavGraph nav = build_nav_graph(topo);
      const Point3 a{coords[0], coords[1], coords[2]}, b{coords[3], coords[4], coords[5]};
      const PlanResult p = plan(topo, nav, a, b);
      for (const auto& w : p.waypoints) {
        std::cout << "waypoint " << format_fixed(w.x) << ' ' << format_fixed(w.y) << ' ' << format_fixed(w.z) << '\n';
      }
      std::cout << "vertices";
      for (int v : p.vertex_sequence) std::cout << ' ' << v;
      std::cout << '\n' << "length " << format_fixed(p.length) << '\n';
      return 0;
    }

    if (*bench) {
      const SlamMap map = load_slam_map(fs::path(scene_dir) / "slam_map.txt", true);
      const BuildResult r = build_topomap(map, cfg);
      const NavGraph nav = build_nav_graph(r.topo);
      Rng rng(cfg.seed);
      const auto records = benchmark_planners(r.topo, nav, r.occupancy, n_queries, rng);
      std::ostringstream csv;
      write_benchmark_csv(csv, records);
      write_file(csv_out, csv.str());
      double mean_topo = 0, mean_grid = 0, max_topo = 0, max_grid = 0;
      std::vector<double> tt, gt;
      for (const auto& rec : records) {
        mean_topo += rec.topo_norm / records.size();
        mean_grid += rec.grid_norm / records.size();
        max_topo = std::max(max_topo, rec.topo_norm);
        max_grid = std::max(max_grid, rec.grid_norm);
        tt.push_back(rec.topo_time_us);
        gt.push_back(rec.grid_time_us);
      }
      std::cout << "queries " << records.size() << '\n'
                << "clusters " << r.topo.vertices.size() << " portals " << r.topo.portals.size() << '\n'
                << "mean_norm topo " << format_fixed(mean_topo, 4) << " grid " << format_fixed(mean_grid, 4) << '\n'
                << "max_norm topo " << format_fixed(max_topo, 4) << " grid " << format_fixed(max_grid, 4) << '\n'
                << "median_time_us topo " << format_fixed(median(tt), 1) << " grid "
                << format_fixed(median(gt), 1) << '\n';
      return 0;
    }

    if (*capture) {
      std::vector<double> sizes;
      std::stringstream ss(sizes_arg);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
          sizes.push_back(std::stod(tok));
        } catch (const std::exception&) {
          throw Error(ErrorCode::Usage, "bad voxel size '" + tok + "'");
        }
        if (!(sizes.back() > 0)) throw Error(ErrorCode::Usage, "voxel sizes must be positive");
      }
      if (sizes.empty()) throw Error(ErrorCode::Usage, "empty voxel size list");
      auto scene_in = open_in(fs::path(scene_dir) / "scene.txt");
      const SceneSpec scene = read_scene(scene_in);
      const SlamMap map = load_slam_map(fs::path(scene_dir) / "slam_map.txt", true);
      std::ostringstream csv;
      csv << "voxel_size,free_captured,occupied_captured\n";
      for (double s : sizes) {
        const CaptureRatio c = captured_space_ratio(sparse_occupancy(map, cfg, s), rasterize(scene, s));
        csv << format_fixed(s) << ',' << format_fixed(c.free_captured) << ',' << format_fixed(c.occupied_captured) << '\n';
      }
      write_file(csv_out, csv.str());
      std::cout << csv.str();
      return 0;
    }

    std::cerr << app.help();
    return static_cast<int>(ErrorCode::Usage);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCode::Generic);
  }
}
