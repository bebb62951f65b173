#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lpcc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct DecodeError : Error {
  using Error::Error;
};
struct EmptyCloud : Error {
  using Error::Error;
};

/// Integer voxel coordinate. Final after voxelization, no fractional part.
struct Point3 {
  int32_t x = 0, y = 0, z = 0;

  friend bool operator==(const Point3&, const Point3&) = default;
  friend auto operator<=>(const Point3&, const Point3&) = default;
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  int32_t operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

/// Continuous 3-vector used for line parameters and intermediates.
struct Vec3R {
  double x = 0, y = 0, z = 0;

  Vec3R operator+(const Vec3R& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3R operator-(const Vec3R& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3R operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3R operator-() const { return {-x, -y, -z}; }
  double dot(const Vec3R& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3R cross(const Vec3R& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  Vec3R normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend bool operator==(const Vec3R&, const Vec3R&) = default;
};

inline Vec3R to_vec(const Point3& p) {
  return {double(p.x), double(p.y), double(p.z)};
}

/// Round half away from zero. Fixed so voxelization is platform-independent.
inline int32_t round_away(double v) {
  return static_cast<int32_t>(v < 0 ? std::ceil(v - 0.5) : std::floor(v + 0.5));
}

inline Point3 round_point(const Vec3R& v) {
  return {round_away(v.x), round_away(v.y), round_away(v.z)};
}

struct BBox {
  Point3 min{std::numeric_limits<int32_t>::max(), std::numeric_limits<int32_t>::max(),
             std::numeric_limits<int32_t>::max()};
  Point3 max{std::numeric_limits<int32_t>::min(), std::numeric_limits<int32_t>::min(),
             std::numeric_limits<int32_t>::min()};

  void expand(const Point3& p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    min.z = std::min(min.z, p.z);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
    max.z = std::max(max.z, p.z);
  }
  bool contains(const Point3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
  /// Per-axis extent (max - min).
  Point3 extent() const { return max - min; }
  int64_t longest_edge() const {
    Point3 e = extent();
    return std::max<int64_t>({e.x, e.y, e.z});
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Ordered collection of voxelized points with a tight bounding box.
struct PointCloud {
  std::vector<Point3> points;
  BBox bbox;
  double source_scale = 1.0;  // original units per voxel

  size_t size() const { return points.size(); }
  void recompute_bbox() {
    bbox = BBox{};
    for (const auto& p : points) bbox.expand(p);
  }
};

/// Build a cloud from raw voxel points. Deduplication is the default since the
/// codec's distortion metrics treat points as a set; dedup sorts the points.
PointCloud make_cloud(std::vector<Point3> pts, bool keep_duplicates = false);

/// Map real coordinates onto the integer grid: round(coord / scale).
/// Throws on NaN/Inf input or scale <= 0.
PointCloud voxelize(const std::vector<std::array<double, 3>>& raw, double scale,
                    bool keep_duplicates = false);

}  // namespace lpcc
