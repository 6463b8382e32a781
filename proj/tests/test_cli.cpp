#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(TOPOMAP_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Value following `key` in the CLI report.
std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string k, v;
    ls >> k >> v;
    if (k == key || k == key + ":") return v;
  }
  return {};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("topomap_cli_test_" + std::to_string(getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("synth is byte-identical for a fixed seed") {
  TempDir t;
  const auto a = t.path / "a", b = t.path / "b";
  REQUIRE(cli("--seed 7 synth --preset pillars --out " + a.string()).code == 0);
  REQUIRE(cli("--seed 7 synth --preset pillars --out " + b.string()).code == 0);
  for (const char* f : {"slam_map.txt", "ground_truth.grid", "scene.txt"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("usage and IO errors") {
  TempDir t;
  const Run bad = cli("synth --preset moon_base --out " + (t.path / "x").string());
  CHECK(bad.code == 2);
  CHECK(bad.out.find("pillars") != std::string::npos);

  std::ofstream(t.path / "file") << "x";
  CHECK(cli("synth --preset office --out " + (t.path / "file" / "sub").string()).code == 5);
  CHECK(cli("frobnicate").code == 2);
  CHECK(cli("build --map " + (t.path / "missing.txt").string() + " --out " + (t.path / "o").string()).code == 5);
}

TEST_CASE("print-config") {
  const Run r = cli("--voxel-size 0.3 --print-config");
  CHECK(r.code == 0);
  CHECK(r.out.find("voxel_size = 0.300000") != std::string::npos);
}

TEST_CASE("build, plan, benchmark and capture on generated scenes") {
  TempDir t;
  const auto scene = t.path / "corridor";
  REQUIRE(cli("synth --preset corridor --out " + scene.string()).code == 0);
  const auto topo = t.path / "c.topomap";
  const Run b = cli("build --map " + (scene / "slam_map.txt").string() + " --out " + topo.string());
  REQUIRE(b.code == 0);
  const std::string before = field(b.out, "clusters_before"), after = field(b.out, "clusters_after");
  REQUIRE_FALSE(before.empty());
  CHECK(std::stoul(after) <= std::stoul(before));

  const Run far = cli("plan " + topo.string() + " 500 500 500 1 1 1");
  CHECK(far.code == 3);

  // Same point twice: first waypoint of the map's first vertex.
  std::ifstream in(topo);
  std::string header, tag, x, y, z;
  std::getline(in, header);
  std::getline(in, tag);
  in >> x >> y >> z;
  const Run same = cli("plan " + topo.string() + " " + x + " " + y + " " + z + " " + x + " " + y + " " + z);
  CHECK(same.code == 0);
  CHECK(field(same.out, "length") == "0.000000");

  const auto csv = t.path / "bench.csv";
  REQUIRE(cli("benchmark --scene " + scene.string() + " -n 20 --out " + csv.string()).code == 0);
  CHECK(lines(slurp(csv)) == 21);

  const auto cap = t.path / "cap.csv";
  REQUIRE(cli("eval-capture --scene " + scene.string() + " --voxel-sizes 0.1,0.15,0.2,0.25,0.3 --out " + cap.string()).code == 0);
  CHECK(lines(slurp(cap)) == 6);
  CHECK(cli("eval-capture --scene " + scene.string() + " --voxel-sizes \"\" --out " + cap.string()).code == 2);
}
