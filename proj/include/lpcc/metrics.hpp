#pragma once

#include <cstdint>
#include <vector>

#include "lpcc/geometry.hpp"

namespace lpcc {

/// Static median-split k-d tree over a point set; nearest and k-nearest
/// queries are read-only after construction.
class KdTree {
 public:
  explicit KdTree(const std::vector<Point3>& points);

  /// Index of the nearest point and its squared distance.
  std::pair<uint32_t, double> nearest(const Vec3R& q) const;

  /// Indices of the k nearest points (unsorted).
  std::vector<uint32_t> knearest(const Vec3R& q, uint32_t k) const;

  size_t size() const { return pts_.size(); }
  const Point3& point(uint32_t i) const { return pts_[i]; }

 private:
  struct Node {
    int32_t left = -1, right = -1;
    uint32_t index = 0;
    uint8_t axis = 0;
  };
  int32_t build(uint32_t* first, uint32_t* last, int depth);
  std::vector<Point3> pts_;
  std::vector<Node> nodes_;
  int32_t root_ = -1;
};

struct DistortionReport {
  double d1_mse = 0;
  double d2_mse = 0;
  double d1_psnr = 0;
  double d2_psnr = 0;
  double peak = 0;
  uint32_t d2_fallbacks = 0;  // degenerate normal neighborhoods
};

/// Point-to-point MSE, directional (each test point against its nearest
/// reference point).
double d1(const PointCloud& reference, const PointCloud& test);
double d1_symmetric(const PointCloud& a, const PointCloud& b);

/// Point-to-plane MSE: error projected onto the reference point's normal,
/// normals from the k-NN covariance (smallest eigenvector). Degenerate
/// (collinear) neighborhoods fall back to the point-to-point error.
double d2(const PointCloud& reference, const PointCloud& test, uint32_t normals_k,
          uint32_t* fallback_count = nullptr);
double d2_symmetric(const PointCloud& a, const PointCloud& b, uint32_t normals_k);

/// Normals of a point set from its k nearest neighbors; zero vector marks a
/// degenerate neighborhood.
std::vector<Vec3R> estimate_normals(const std::vector<Point3>& points, uint32_t k);

/// PSNR = 10 log10(3 peak^2 / mse); +inf at zero error.
double geometry_psnr(double mse, double peak);

/// Symmetric report with peak = longest bbox edge of the reference (or the
/// supplied override, for cross-run comparability).
DistortionReport evaluate(const PointCloud& reference, const PointCloud& test,
                          uint32_t normals_k = 12, double peak_override = 0);

struct RdCurve {
  // (bits per point, PSNR dB), sorted by strictly increasing rate.
  std::vector<std::pair<double, double>> points;
};

/// Bjontegaard delta rate in percent (negative = test saves bitrate): cubic
/// fit of log10-rate against PSNR, rate difference integrated over the common
/// PSNR interval.
double bd_rate(const RdCurve& anchor, const RdCurve& test);

}  // namespace lpcc
