#include "topomap/hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace topomap {
namespace {

struct Face {
  int v[3];
  Point3 normal;  // unnormalized: cross(b - a, c - a)
  double tol;     // visibility threshold scaled by |normal|
  std::vector<int> outside;
  bool alive = true;
};

struct EdgeKey {
  int a, b;
  bool operator==(const EdgeKey&) const = default;
};
struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const noexcept {
    return std::hash<long long>()((static_cast<long long>(e.a) << 32) ^ static_cast<unsigned>(e.b));
  }
};

/// Result of the raw Quickhull: triangles (outward CCW) over input indices.
struct RawHull {
  bool degenerate = false;
  int dimension = 3;  // 0 point, 1 line, 2 plane, 3 solid
  Point3 plane_normal;
  Point3 line_dir;
  std::vector<std::array<int, 3>> triangles;
};

class Quickhull {
 public:
  Quickhull(std::span<const Point3> pts, double tol) : pts_(pts), tol_(tol) {}

  RawHull run() {
    RawHull raw;
    int i0 = 0, i1 = 0;
    // Two farthest-apart axis extremes.
    {
      int ext[6] = {0, 0, 0, 0, 0, 0};
      for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
        for (int ax = 0; ax < 3; ++ax) {
          if (pts_[i][ax] < pts_[ext[2 * ax]][ax]) ext[2 * ax] = i;
          if (pts_[i][ax] > pts_[ext[2 * ax + 1]][ax]) ext[2 * ax + 1] = i;
        }
      }
      double best = -1.0;
      for (int ax = 0; ax < 3; ++ax) {
        double d = distance(pts_[ext[2 * ax]], pts_[ext[2 * ax + 1]]);
        if (d > best) {
          best = d;
          i0 = ext[2 * ax];
          i1 = ext[2 * ax + 1];
        }
      }
      if (best <= tol_) {
        raw.degenerate = true;
        raw.dimension = 0;
        return raw;
      }
    }
    const Point3 line = pts_[i1] - pts_[i0];
    int i2 = -1;
    double best = 0.0;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      double d = norm(cross(line, pts_[i] - pts_[i0]));
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (i2 < 0 || best <= tol_ * norm(line)) {
      raw.degenerate = true;
      raw.dimension = 1;
      raw.line_dir = line / norm(line);
      return raw;
    }
    const Point3 pn = cross(line, pts_[i2] - pts_[i0]);
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      double d = std::abs(dot(pn, pts_[i] - pts_[i0]));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (i3 < 0 || best <= tol_ * norm(pn)) {
      raw.degenerate = true;
      raw.dimension = 2;
      raw.plane_normal = pn / norm(pn);
      return raw;
    }

    // Initial tetrahedron, oriented so that every face points away from the fourth vertex.
    if (dot(pn, pts_[i3] - pts_[i0]) > 0) std::swap(i1, i2);
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);

    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      assign(i, {0, 1, 2, 3});
    }

    for (std::size_t f = 0; f < faces_.size(); ++f) {
      // faces_ grows inside the loop; revisiting from the start is not needed because new faces
      // are appended and old faces only ever die.
      while (faces_[f].alive && !faces_[f].outside.empty()) expand(static_cast<int>(f));
    }

    for (const auto& face : faces_) {
      if (face.alive) raw.triangles.push_back({face.v[0], face.v[1], face.v[2]});
    }
    return raw;
  }

 private:
  double signed_dist(const Face& f, int p) const {
    return dot(f.normal, pts_[p] - pts_[f.v[0]]);
  }

  int add_face(int a, int b, int c) {
    Face f;
    f.v[0] = a;
    f.v[1] = b;
    f.v[2] = c;
    f.normal = cross(pts_[b] - pts_[a], pts_[c] - pts_[a]);
    f.tol = tol_ * norm(f.normal);
    faces_.push_back(std::move(f));
    const int id = static_cast<int>(faces_.size()) - 1;
    edges_[{a, b}] = id;
    edges_[{b, c}] = id;
    edges_[{c, a}] = id;
    return id;
  }

  void assign(int p, const std::vector<int>& candidates) {
    for (int f : candidates) {
      if (signed_dist(faces_[f], p) > faces_[f].tol) {
        faces_[f].outside.push_back(p);
        return;
      }
    }
  }

  void expand(int start) {
    Face& sf = faces_[start];
    int eye = sf.outside.front();
    double far = signed_dist(sf, eye);
    for (int p : sf.outside) {
      double d = signed_dist(sf, p);
      if (d > far) {
        far = d;
        eye = p;
      }
    }

    std::vector<int> visible{start};
    std::vector<char> is_visible(faces_.size(), 0);
    is_visible[start] = 1;
    std::vector<EdgeKey> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Face& f = faces_[visible[q]];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        const int nb = edges_.at({b, a});
        if (is_visible[nb]) continue;
        if (signed_dist(faces_[nb], eye) > faces_[nb].tol) {
          is_visible[nb] = 1;
          visible.push_back(nb);
        }
      }
    }
    for (int fid : visible) {
      const Face& f = faces_[fid];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        if (!is_visible[edges_.at({b, a})]) horizon.push_back({a, b});
      }
    }

    std::vector<int> orphans;
    for (int fid : visible) {
      Face& f = faces_[fid];
      f.alive = false;
      for (int e = 0; e < 3; ++e) edges_.erase({f.v[e], f.v[(e + 1) % 3]});
      for (int p : f.outside) {
        if (p != eye) orphans.push_back(p);
      }
      f.outside.clear();
      f.outside.shrink_to_fit();
    }

    std::vector<int> created;
    created.reserve(horizon.size());
    for (const auto& e : horizon) created.push_back(add_face(e.a, e.b, eye));
    std::sort(orphans.begin(), orphans.end());
    for (int p : orphans) assign(p, created);
  }

  std::span<const Point3> pts_;
  double tol_;
  std::vector<Face> faces_;
  std::unordered_map<EdgeKey, int, EdgeKeyHash> edges_;
};

std::vector<Point3> inflate(std::span<const Point3> pts, const RawHull& raw) {
  const double e = kDegenerateInflation;
  std::vector<Point3> out;
  if (raw.dimension == 0) {
    const Point3 p = pts[0];
    for (int ax = 0; ax < 3; ++ax) {
      Point3 d{0, 0, 0};
      d[ax] = e;
      out.push_back(p + d);
      out.push_back(p - d);
    }
    return out;
  }
  std::vector<Point3> dirs;
  if (raw.dimension == 1) {
    const Point3 d = raw.line_dir;
    // Any vector not parallel to d seeds the perpendicular pair.
    Point3 seed = std::abs(d.x) < 0.9 ? Point3{1, 0, 0} : Point3{0, 1, 0};
    Point3 u = cross(d, seed);
    u = u / norm(u);
    Point3 w = cross(d, u);
    dirs = {u, w};
  } else {
    dirs = {raw.plane_normal};
  }
  for (const auto& p : pts) {
    for (const auto& d : dirs) {
      out.push_back(p + d * e);
      out.push_back(p - d * e);
    }
  }
  return out;
}

ConvexHull finish(std::span<const Point3> pts, const RawHull& raw,
                  const std::vector<Point3>* world = nullptr, std::vector<int>* kept = nullptr) {
  // `world`, when given, maps each lattice point to its world position (same order).
  auto position = [&](int i) { return world ? (*world)[i] : pts[i]; };
  ConvexHull hull;
  std::vector<int> used;
  for (const auto& t : raw.triangles) {
    const Point3 a = position(t[0]), b = position(t[1]), c = position(t[2]);
    hull.volume += dot(a, cross(b, c)) / 6.0;
    Point3 n = cross(b - a, c - a);
    n = n / norm(n);
    HalfSpace hs{n, dot(n, a)};
    // Equal supporting planes describe the same half-space.
    bool dup = false;
    for (const auto& other : hull.faces) {
      if (norm(other.normal - hs.normal) < 1e-9 && std::abs(other.offset - hs.offset) < 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) hull.faces.push_back(hs);
    used.insert(used.end(), t.begin(), t.end());
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  // Triangulated facets can carry points from the middle of a face or edge. Only points where
  // incident planes span all three directions are corners.
  std::map<int, std::vector<Point3>> planes;
  for (const auto& t : raw.triangles) {
    Point3 n = cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]);
    n = n / norm(n);
    for (int i : t) {
      auto& list = planes[i];
      bool seen = false;
      for (const auto& m : list) seen = seen || norm(m - n) < 1e-9;
      if (!seen) list.push_back(n);
    }
  }
  auto corner = [&](int i) {
    const auto& n = planes[i];
    for (std::size_t a = 0; a < n.size(); ++a)
      for (std::size_t b = a + 1; b < n.size(); ++b)
        for (std::size_t c = b + 1; c < n.size(); ++c)
          if (std::abs(dot(n[a], cross(n[b], n[c]))) > 1e-9) return true;
    return false;
  };
  std::erase_if(used, [&](int i) { return !corner(i); });
  if (kept) *kept = used;
  for (int i : used) hull.vertices.push_back(position(i));
  std::sort(hull.vertices.begin(), hull.vertices.end(), [](const Point3& a, const Point3& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  hull.vertices.erase(std::unique(hull.vertices.begin(), hull.vertices.end()), hull.vertices.end());
  return hull;
}

double extent_of(std::span<const Point3> pts) {
  Box3 box{pts[0], pts[0]};
  for (const auto& p : pts) box.expand(p);
  return std::max({box.max.x - box.min.x, box.max.y - box.min.y, box.max.z - box.min.z,
                   std::abs(box.max.x), std::abs(box.max.y), std::abs(box.max.z),
                   std::abs(box.min.x), std::abs(box.min.y), std::abs(box.min.z), 1.0});
}

}  // namespace

ConvexHull compute_hull(std::span<const Point3> points) {
  if (points.empty()) throw Error(ErrorCode::Generic, "compute_hull: empty input");
  const double tol = 1e-12 * extent_of(points);
  RawHull raw = Quickhull(points, tol).run();
  if (!raw.degenerate) return finish(points, raw);
  std::vector<Point3> inflated = inflate(points, raw);
  RawHull fat = Quickhull(inflated, tol).run();
  if (fat.degenerate) throw Error(ErrorCode::Generic, "compute_hull: inflation failed");
  ConvexHull hull = finish(inflated, fat);
  hull.inflated = true;
  return hull;
}

ConvexHull compute_voxel_hull(std::span<const VoxelIndex> voxels, double voxel_size,
                              std::vector<VoxelIndex>* extreme) {
  if (voxels.empty()) throw Error(ErrorCode::Generic, "compute_voxel_hull: empty input");
  std::vector<Point3> lattice;
  std::vector<Point3> world;
  lattice.reserve(voxels.size());
  world.reserve(voxels.size());
  for (const auto& v : voxels) {
    lattice.push_back({static_cast<double>(v.i), static_cast<double>(v.j), static_cast<double>(v.k)});
    world.push_back(voxel_center(v, voxel_size));
  }
  // Integer coordinates keep every cross/dot product exact, so a zero tolerance is exact.
  RawHull raw = Quickhull(lattice, 0.0).run();
  if (raw.degenerate) {
    if (extreme) extreme->assign(voxels.begin(), voxels.end());
    return compute_hull(world);
  }
  std::vector<int> kept;
  ConvexHull hull = finish(lattice, raw, &world, &kept);
  if (extreme) {
    extreme->clear();
    for (int i : kept) extreme->push_back(voxels[i]);
    std::sort(extreme->begin(), extreme->end());
    extreme->erase(std::unique(extreme->begin(), extreme->end()), extreme->end());
  }
  return hull;
}

bool hull_contains(const ConvexHull& hull, const Point3& p, double eps) {
  for (const auto& f : hull.faces) {
    if (dot(f.normal, p) - f.offset > eps) return false;
  }
  return true;
}

}  // namespace topomap
