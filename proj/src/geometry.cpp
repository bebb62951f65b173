#include "lpcc/geometry.hpp"

namespace lpcc {

PointCloud make_cloud(std::vector<Point3> pts, bool keep_duplicates) {
  if (pts.empty()) throw EmptyCloud("point cloud has no points");
  if (!keep_duplicates) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }
  PointCloud c;
  c.points = std::move(pts);
  c.recompute_bbox();
  return c;
}

PointCloud voxelize(const std::vector<std::array<double, 3>>& raw, double scale,
                    bool keep_duplicates) {
  if (!(scale > 0)) throw Error("voxelize: scale must be > 0");
  std::vector<Point3> pts;
  pts.reserve(raw.size());
  for (const auto& r : raw) {
    for (double c : r)
      if (!std::isfinite(c)) throw Error("voxelize: non-finite coordinate");
    pts.push_back({round_away(r[0] / scale), round_away(r[1] / scale),
                   round_away(r[2] / scale)});
  }
  PointCloud c = make_cloud(std::move(pts), keep_duplicates);
  c.source_scale = scale;
  return c;
}

}  // namespace lpcc
