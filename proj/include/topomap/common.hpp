#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace topomap {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Point3() = default;
  constexpr Point3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }

  constexpr Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Point3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  constexpr bool operator==(const Point3&) const = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

/// Axis-aligned box, closed on both ends.
struct Box3 {
  Point3 min;
  Point3 max;

  bool contains(const Point3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  double volume() const { return (max.x - min.x) * (max.y - min.y) * (max.z - min.z); }
  void expand(const Point3& p) {
    min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
    max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
  }
};

/// Process exit codes; every Error carries one.
enum class ErrorCode : int {
  Generic = 1,
  Usage = 2,
  NotLocated = 3,
  NoPath = 4,
  Format = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using Rng = std::mt19937_64;

/// Uniform draw in [0, n). Unlike std::uniform_int_distribution the result does not depend on
/// the standard library implementation.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::Generic, "uniform_index: empty range");
  return static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Standard normal via Box-Muller (implementation-independent, unlike std::normal_distribution).
inline double standard_normal(Rng& rng) {
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Fixed 6-decimal formatting used by every text format.
std::string format_fixed(double value, int decimals = 6);

}  // namespace topomap
