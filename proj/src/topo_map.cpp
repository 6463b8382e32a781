#include "topomap/topo_map.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

namespace topomap {

bool TopologicalMap::has_voxels() const {
  return !vertices.empty() &&
         std::all_of(vertices.begin(), vertices.end(), [](const auto& v) { return !v.voxels.empty(); });
}

void TopologicalMap::index_voxels() {
  owner.clear();
  for (const auto& c : vertices)
    for (const auto& v : c.voxels) owner[v] = c.id;
}

std::vector<Portal> extract_portals(const std::vector<VoxelCluster>& clusters, double voxel_size) {
  std::unordered_map<VoxelIndex, int> owner;
  for (const auto& c : clusters)
    for (const auto& v : c.voxels) owner[v] = c.id;
  std::map<std::pair<int, int>, std::vector<Point3>> faces;
  for (const auto& c : clusters) {
    for (const auto& v : c.voxels) {
      for (int ax = 0; ax < 3; ++ax) {
        VoxelIndex n = v;
        ++n[ax];
        auto it = owner.find(n);
        if (it == owner.end() || it->second == c.id) continue;
        Point3 face = voxel_center(v, voxel_size);
        face[ax] += 0.5 * voxel_size;
        faces[{std::min(c.id, it->second), std::max(c.id, it->second)}].push_back(face);
      }
    }
  }
  std::vector<Portal> portals;
  for (auto& [pair, centers] : faces) {
    std::sort(centers.begin(), centers.end(), [](const Point3& a, const Point3& b) {
      return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    });
    Portal p;
    p.id = static_cast<int>(portals.size());
    p.vertex_a = pair.first;
    p.vertex_b = pair.second;
    Point3 sum{0, 0, 0};
    for (const auto& f : centers) sum += f;
    p.center = sum / static_cast<double>(centers.size());
    p.face_count = centers.size();
    p.shared_faces = std::move(centers);
    portals.push_back(std::move(p));
  }
  return portals;
}

TopologicalMap make_topological_map(std::vector<VoxelCluster> clusters, double voxel_size) {
  TopologicalMap topo;
  topo.voxel_size = voxel_size;
  for (std::size_t i = 0; i < clusters.size(); ++i) clusters[i].id = static_cast<int>(i);
  topo.portals = extract_portals(clusters, voxel_size);
  topo.vertices = std::move(clusters);
  topo.index_voxels();
  return topo;
}

NavGraph build_nav_graph(const TopologicalMap& topo) {
  NavGraph nav;
  nav.vertex_portals.resize(topo.vertices.size());
  for (const auto& p : topo.portals) {
    nav.nodes.push_back(p.center);
    nav.vertex_portals.at(p.vertex_a).push_back(p.id);
    nav.vertex_portals.at(p.vertex_b).push_back(p.id);
  }
  nav.adjacency.resize(nav.nodes.size());
  for (std::size_t v = 0; v < nav.vertex_portals.size(); ++v) {
    const auto& ports = nav.vertex_portals[v];
    for (std::size_t i = 0; i < ports.size(); ++i) {
      for (std::size_t j = i + 1; j < ports.size(); ++j) {
        const int a = ports[i], b = ports[j];
        const int e = static_cast<int>(nav.edges.size());
        nav.edges.push_back({a, b, distance(nav.nodes[a], nav.nodes[b]), static_cast<int>(v)});
        nav.adjacency[a].emplace_back(b, e);
        nav.adjacency[b].emplace_back(a, e);
      }
    }
  }
  return nav;
}

int locate(const TopologicalMap& topo, const Point3& p) {
  if (!p.finite()) throw Error(ErrorCode::NotLocated, "locate: non-finite point");
  if (topo.has_voxels()) {
    auto it = topo.owner.find(world_to_voxel(p, topo.voxel_size));
    if (it == topo.owner.end()) throw Error(ErrorCode::NotLocated, "point is not inside any cluster");
    return it->second;
  }
  int best = -1;
  for (const auto& c : topo.vertices) {
    if (!hull_contains(c.hull, p)) continue;
    if (best < 0 || c.hull.volume < topo.vertices[best].hull.volume) best = c.id;
  }
  if (best < 0) throw Error(ErrorCode::NotLocated, "point is not inside any cluster");
  return best;
}

PlanResult plan(const TopologicalMap& topo, const NavGraph& nav, const Point3& a, const Point3& b) {
  const int ca = locate(topo, a);
  const int cb = locate(topo, b);

  // Augmented graph: portal nodes, then A = n, B = n + 1.
  const int n = static_cast<int>(nav.nodes.size());
  const int node_a = n, node_b = n + 1;
  auto position = [&](int node) { return node == node_a ? a : (node == node_b ? b : nav.nodes[node]); };

  struct Arc {
    int to;
    double w;
    int vertex;
  };
  auto arcs = [&](int node, std::vector<Arc>& out) {
    out.clear();
    if (node == node_a) {
      for (int p : nav.vertex_portals[ca]) out.push_back({p, distance(a, nav.nodes[p]), ca});
      if (ca == cb) out.push_back({node_b, distance(a, b), ca});
      return;
    }
    if (node == node_b) return;
    for (const auto& [nb, e] : nav.adjacency[node]) out.push_back({nb, nav.edges[e].weight, nav.edges[e].vertex});
    const Portal& portal = topo.portals[node];
    if (portal.vertex_a == cb || portal.vertex_b == cb) out.push_back({node_b, distance(nav.nodes[node], b), cb});
  };

  std::vector<double> g(n + 2, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n + 2, -1), parent_vertex(n + 2, -1);
  std::vector<char> closed(n + 2, 0);
  using Item = std::pair<double, int>;  // (f, node); ties by node id
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  g[node_a] = 0.0;
  open.push({distance(a, b), node_a});
  std::vector<Arc> out;
  while (!open.empty()) {
    const int u = open.top().second;
    open.pop();
    if (closed[u]) continue;
    closed[u] = 1;
    if (u == node_b) break;
    arcs(u, out);
    for (const auto& arc : out) {
      const double cand = g[u] + arc.w;
      if (cand < g[arc.to]) {
        g[arc.to] = cand;
        parent[arc.to] = u;
        parent_vertex[arc.to] = arc.vertex;
        open.push({cand + distance(position(arc.to), b), arc.to});
      }
    }
  }
  if (!closed[node_b]) throw Error(ErrorCode::NoPath, "no path between the located clusters");

  PlanResult result;
  std::vector<int> chain;
  for (int v = node_b; v != -1; v = parent[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    result.waypoints.push_back(position(chain[i]));
    if (i > 0) {
      result.length += distance(result.waypoints[i - 1], result.waypoints[i]);
      const int vtx = parent_vertex[chain[i]];
      if (result.vertex_sequence.empty() || result.vertex_sequence.back() != vtx) {
        result.vertex_sequence.push_back(vtx);
      }
    }
  }
  return result;
}

void serialize_topomap(std::ostream& out, const TopologicalMap& topo) {
  out << "TOPOMAP v1 voxel_size=" << format_fixed(topo.voxel_size) << '\n';
  for (const auto& v : topo.vertices) {
    out << "V " << v.id << ' ' << format_fixed(v.volume_m3) << ' ' << v.hull.vertices.size() << '\n';
    for (const auto& p : v.hull.vertices) {
      out << format_fixed(p.x) << ' ' << format_fixed(p.y) << ' ' << format_fixed(p.z) << '\n';
    }
  }
  for (const auto& p : topo.portals) {
    out << "P " << p.id << ' ' << p.vertex_a << ' ' << p.vertex_b << ' ' << format_fixed(p.center.x)
        << ' ' << format_fixed(p.center.y) << ' ' << format_fixed(p.center.z) << ' ' << p.face_count
        << '\n';
  }
}

namespace {

[[noreturn]] void format_error(std::size_t line_no, const std::string& msg) {
  throw Error(ErrorCode::Format, "topomap line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

TopologicalMap deserialize_topomap(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(ErrorCode::Format, "topomap: empty file");
  const std::string header = "TOPOMAP v1 voxel_size=";
  if (line.rfind("TOPOMAP ", 0) != 0) format_error(line_no, "missing TOPOMAP header");
  if (line.rfind(header, 0) != 0) format_error(line_no, "unsupported version");
  TopologicalMap topo;
  try {
    std::size_t used = 0;
    topo.voxel_size = std::stod(line.substr(header.size()), &used);
    if (used != line.size() - header.size() || !(topo.voxel_size > 0)) throw std::invalid_argument("");
  } catch (const std::exception&) {
    format_error(line_no, "bad voxel_size");
  }

  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw Error(ErrorCode::Format, std::string("topomap: truncated, expected ") + what);
    ++line_no;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag, extra;
    ss >> tag;
    if (tag == "V") {
      VoxelCluster c;
      std::size_t n = 0;
      if (!(ss >> c.id >> c.volume_m3 >> n) || (ss >> extra) || n == 0) format_error(line_no, "malformed vertex");
      if (c.id != static_cast<int>(topo.vertices.size())) format_error(line_no, "vertex ids must be dense");
      std::vector<Point3> pts(n);
      for (auto& p : pts) {
        next("hull vertex");
        std::istringstream ps(line);
        if (!(ps >> p.x >> p.y >> p.z) || (ps >> extra) || !p.finite()) format_error(line_no, "malformed hull vertex");
      }
      c.hull = compute_hull(pts);
      Point3 sum{0, 0, 0};
      for (const auto& p : pts) sum += p;
      c.centroid = sum / static_cast<double>(n);
      topo.vertices.push_back(std::move(c));
    } else if (tag == "P") {
      Portal p;
      if (!(ss >> p.id >> p.vertex_a >> p.vertex_b >> p.center.x >> p.center.y >> p.center.z >> p.face_count) ||
          (ss >> extra)) {
        format_error(line_no, "malformed portal");
      }
      if (p.id != static_cast<int>(topo.portals.size())) format_error(line_no, "portal ids must be dense");
      topo.portals.push_back(p);
    } else {
      format_error(line_no, "unknown record '" + tag + "'");
    }
  }
  std::map<std::pair<int, int>, int> seen;
  for (const auto& p : topo.portals) {
    const int nv = static_cast<int>(topo.vertices.size());
    if (p.vertex_a < 0 || p.vertex_b < 0 || p.vertex_a >= nv || p.vertex_b >= nv) {
      throw Error(ErrorCode::Format, "topomap: portal " + std::to_string(p.id) + " references a missing vertex");
    }
    if (p.vertex_a == p.vertex_b) throw Error(ErrorCode::Format, "topomap: self-portal");
    if (!seen.emplace(std::minmax(p.vertex_a, p.vertex_b), p.id).second) {
      throw Error(ErrorCode::Format, "topomap: duplicate portal between the same vertices");
    }
  }
  return topo;
}

}  // namespace topomap
