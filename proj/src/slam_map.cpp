#include "topomap/slam_map.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace topomap {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::Format, "slam map line " + std::to_string(line_no) + ": " + msg);
}

double parse_real(std::string_view field, std::size_t line_no) {
  // from_chars accepts "nan"/"inf"; those are caught by the finiteness check instead.
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    fail(line_no, "non-numeric field '" + std::string(field) + "'");
  }
  return value;
}

Point3 parse_point(const std::vector<std::string_view>& f, std::size_t offset, std::size_t line_no) {
  Point3 p{parse_real(f[offset], line_no), parse_real(f[offset + 1], line_no),
           parse_real(f[offset + 2], line_no)};
  if (!p.finite()) fail(line_no, "non-finite coordinate");
  return p;
}

}  // namespace

SlamMap parse_slam_map(std::istream& in, const ParseOptions& options) {
  SlamMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields[0] == "T") {
      if (fields.size() != 4 && fields.size() != 5) {
        fail(line_no, "trajectory record needs 3 coordinates and an optional timestamp");
      }
      map.trajectory.push_back(parse_point(fields, 1, line_no));
      if (fields.size() == 5) parse_real(fields[4], line_no);
    } else if (fields[0] == "O") {
      if (fields.size() != 7) fail(line_no, "observation record needs 6 coordinates");
      LandmarkObservation obs{parse_point(fields, 1, line_no), parse_point(fields, 4, line_no)};
      if (distance(obs.observer, obs.landmark) <= 0.0) fail(line_no, "zero-length observation ray");
      map.observations.push_back(obs);
    } else {
      fail(line_no, "unknown record type '" + std::string(fields[0]) + "'");
    }
  }
  if (in.bad()) throw Error(ErrorCode::Format, "slam map: read error");
  if (map.trajectory.empty()) throw Error(ErrorCode::Format, "slam map: empty trajectory");
  if (map.observations.empty() && !options.allow_empty_observations) {
    throw Error(ErrorCode::Format, "slam map: no observations");
  }
  return map;
}

void write_slam_map(std::ostream& out, const SlamMap& map) {
  auto put = [&](const Point3& p) {
    out << ' ' << format_fixed(p.x) << ' ' << format_fixed(p.y) << ' ' << format_fixed(p.z);
  };
  for (const auto& p : map.trajectory) {
    out << 'T';
    put(p);
    out << '\n';
  }
  for (const auto& o : map.observations) {
    out << 'O';
    put(o.observer);
    put(o.landmark);
    out << '\n';
  }
}

SlamMapStats slam_map_stats(const SlamMap& map) {
  SlamMapStats stats;
  stats.observation_count = map.observations.size();
  if (map.trajectory.empty()) return stats;
  stats.bounding_box = {map.trajectory.front(), map.trajectory.front()};
  for (std::size_t i = 0; i < map.trajectory.size(); ++i) {
    stats.bounding_box.expand(map.trajectory[i]);
    if (i > 0) stats.trajectory_length_m += distance(map.trajectory[i - 1], map.trajectory[i]);
  }
  for (const auto& o : map.observations) {
    stats.bounding_box.expand(o.landmark);
    stats.bounding_box.expand(o.observer);
  }
  return stats;
}

}  // namespace topomap
