#include "lpcc/linemodel.hpp"

#include <map>
#include <mutex>
#include <numeric>

namespace lpcc {

bool eligible(size_t point_count, uint32_t depth, const DetectorConfig& cfg) {
  if (point_count < cfg.min_points) return false;
  return point_count <= cfg.max_points || depth >= cfg.depth_threshold;
}

std::pair<Vec3R, Vec3R> fit_line_pca(const std::vector<Vec3R>& points) {
  if (points.size() < 2) throw DegenerateLine("fit_line_pca: fewer than 2 points");
  Vec3R a{0, 0, 0};
  for (const auto& p : points) a = a + p;
  a = a * (1.0 / double(points.size()));

  double xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;
  for (const auto& p : points) {
    Vec3R q = p - a;
    xx += q.x * q.x;
    yy += q.y * q.y;
    zz += q.z * q.z;
    xy += q.x * q.y;
    xz += q.x * q.z;
    yz += q.y * q.z;
  }
  if (xx + yy + zz <= 0) throw DegenerateLine("fit_line_pca: all points identical");
  Eig3 eig = eig3_sym(xx, yy, zz, xy, xz, yz);
  return {a, canonicalize_direction(eig.vectors[0])};
}

// ---------------------------------------------------------------------------
// Direction discretization: geodesic subdivision of the icosahedron, keeping
// one hemisphere since line directions are symmetric.
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec3R> build_directions(uint32_t order) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3R> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v = v.normalized();
  std::vector<std::array<uint32_t, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (uint32_t it = 0; it < order; ++it) {
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoint;
    auto mid = [&](uint32_t i, uint32_t j) {
      auto key = std::minmax(i, j);
      auto found = midpoint.find(key);
      if (found != midpoint.end()) return found->second;
      Vec3R m = ((verts[i] + verts[j]) * 0.5).normalized();
      verts.push_back(m);
      uint32_t idx = uint32_t(verts.size() - 1);
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<uint32_t, 3>> next;
    next.reserve(faces.size() * 4);
    for (auto [i, j, k] : faces) {
      uint32_t ij = mid(i, j), jk = mid(j, k), ki = mid(k, i);
      next.push_back({i, ij, ki});
      next.push_back({j, jk, ij});
      next.push_back({k, ki, jk});
      next.push_back({ij, jk, ki});
    }
    faces = std::move(next);
  }

  // Hemisphere filter: z > 0, or on the equator the canonical half.
  std::vector<Vec3R> dirs;
  const double eps = 1e-12;
  for (const auto& v : verts) {
    if (v.z > eps || (std::abs(v.z) <= eps &&
                      (v.y > eps || (std::abs(v.y) <= eps && v.x > eps))))
      dirs.push_back(v);
  }
  return dirs;
}

double point_line_dist2(const Vec3R& x, const Vec3R& a, const Vec3R& b) {
  Vec3R w = x - a;
  double along = w.dot(b);
  return w.norm2() - along * along;
}

std::vector<uint32_t> gather_inliers(const std::vector<Vec3R>& points,
                                     const std::vector<uint32_t>& active,
                                     const Vec3R& a, const Vec3R& b, double dist) {
  std::vector<uint32_t> in;
  double d2 = dist * dist;
  for (uint32_t idx : active)
    if (point_line_dist2(points[idx], a, b) <= d2) in.push_back(idx);
  return in;
}

}  // namespace

const std::vector<Vec3R>& hough_directions(uint32_t granularity) {
  static std::mutex mu;
  static std::map<uint32_t, std::vector<Vec3R>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(granularity);
  if (it == cache.end()) it = cache.emplace(granularity, build_directions(granularity)).first;
  return it->second;
}

std::vector<LineCandidate> hough_detect(const std::vector<Vec3R>& points,
                                        const DetectorConfig& cfg) {
  std::vector<LineCandidate> out;
  if (points.size() < cfg.min_points) return out;

  const auto& dirs = hough_directions(cfg.hough_granularity);
  std::vector<std::pair<Vec3R, Vec3R>> bases;
  bases.reserve(dirs.size());
  for (const auto& b : dirs) bases.push_back(orthonormal_basis(b));

  // Shift space centered on the point centroid, spanning the bbox diagonal.
  Vec3R center{0, 0, 0};
  for (const auto& p : points) center = center + p;
  center = center * (1.0 / double(points.size()));
  Vec3R lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  double diag = (hi - lo).norm();
  if (diag <= 0) return out;
  const uint32_t nb = cfg.hough_shift_bins;
  const double dx = diag / double(nb);
  const uint32_t side = nb + 1;
  auto shift_index = [&](double v) {
    int32_t i = round_away(v / dx) + int32_t(nb / 2);
    return uint32_t(std::clamp<int32_t>(i, 0, int32_t(side) - 1));
  };

  std::vector<uint32_t> active(points.size());
  std::iota(active.begin(), active.end(), 0u);
  std::vector<uint32_t> votes(dirs.size() * side * side);

  const double gather_dist = std::max(cfg.inlier_distance, dx);

  for (uint32_t iter = 0;
       iter < cfg.max_iterations && out.size() < cfg.max_lines_per_node; ++iter) {
    if (active.size() < cfg.min_points) break;

    std::fill(votes.begin(), votes.end(), 0u);
    for (uint32_t idx : active) {
      Vec3R p = points[idx] - center;
      for (size_t di = 0; di < dirs.size(); ++di) {
        uint32_t i1 = shift_index(p.dot(bases[di].first));
        uint32_t i2 = shift_index(p.dot(bases[di].second));
        ++votes[(di * side + i1) * side + i2];
      }
    }
    size_t best = size_t(std::max_element(votes.begin(), votes.end()) - votes.begin());
    if (votes[best] < cfg.min_points) break;

    size_t di = best / (side * side);
    int32_t i1 = int32_t((best / side) % side) - int32_t(nb / 2);
    int32_t i2 = int32_t(best % side) - int32_t(nb / 2);
    Vec3R b = dirs[di];
    Vec3R a = center + bases[di].first * (double(i1) * dx) +
              bases[di].second * (double(i2) * dx);

    auto inliers = gather_inliers(points, active, a, b, gather_dist);
    if (inliers.size() < cfg.min_points) break;

    // PCA refinement, then re-select against the refined line and refit.
    for (int pass = 0; pass < 2; ++pass) {
      std::vector<Vec3R> sel;
      sel.reserve(inliers.size());
      for (uint32_t idx : inliers) sel.push_back(points[idx]);
      try {
        std::tie(a, b) = fit_line_pca(sel);
      } catch (const DegenerateLine&) {
        break;
      }
      inliers = gather_inliers(points, active, a, b, cfg.inlier_distance);
      if (inliers.size() < cfg.min_points) break;
    }
    if (inliers.size() < cfg.min_points) break;

    out.push_back({a, b, inliers});
    std::vector<uint32_t> rest;
    rest.reserve(active.size() - inliers.size());
    size_t j = 0;
    for (uint32_t idx : active) {
      if (j < inliers.size() && inliers[j] == idx)
        ++j;
      else
        rest.push_back(idx);
    }
    active = std::move(rest);
  }

  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return l.inliers.size() > r.inliers.size();
  });
  return out;
}

std::pair<Line, ProjectionParams> project_and_order(const std::vector<Vec3R>& points,
                                                    std::vector<uint32_t> members,
                                                    const Vec3R& a, const Vec3R& b) {
  std::vector<std::pair<double, uint32_t>> order;
  order.reserve(members.size());
  for (uint32_t idx : members) order.emplace_back((points[idx] - a).dot(b), idx);
  std::stable_sort(order.begin(), order.end(), [](const auto& l, const auto& r) {
    return l.first < r.first;
  });

  Line line;
  line.b = b;
  ProjectionParams proj;
  if (order.empty()) return {line, proj};

  // Re-anchor at the first projected point so p_1 = 0.
  double p0 = order.front().first;
  line.a = a + b * p0;

  line.member_indices.reserve(order.size());
  proj.p.reserve(order.size());
  for (const auto& [pv, idx] : order) {
    line.member_indices.push_back(idx);
    proj.p.push_back(pv - p0);
  }
  proj.d.reserve(order.size() > 0 ? order.size() - 1 : 0);
  for (size_t i = 0; i + 1 < proj.p.size(); ++i)
    proj.d.push_back(proj.p[i + 1] - proj.p[i]);
  proj.d_bar = proj.d.empty()
                   ? 0.0
                   : std::accumulate(proj.d.begin(), proj.d.end(), 0.0) /
                         double(proj.d.size());
  proj.mode = ProjectionMode::Even;
  proj.segments = {{0, proj.d_bar}};
  return {line, proj};
}

OffsetParams make_offsets(const std::vector<Vec3R>& points, const Line& line,
                          const ProjectionParams& proj) {
  OffsetParams off;
  off.r.reserve(line.member_indices.size());
  for (size_t i = 0; i < line.member_indices.size(); ++i) {
    Vec3R projected = line.a + line.b * proj.p[i];
    off.r.push_back(points[line.member_indices[i]] - projected);
  }
  return off;
}

double window_distortion(const std::vector<double>& d, size_t first, size_t count) {
  double mean = 0;
  for (size_t t = 0; t < count; ++t) mean += d[first + t];
  mean /= double(count);
  double cum = 0, l1 = 0;
  for (size_t t = 0; t < count; ++t) {
    cum += d[first + t] - mean;
    l1 += std::abs(cum);
  }
  return l1 / double(count);
}

std::vector<Segment> segment_piecewise(const std::vector<double>& d, double tolerance) {
  std::vector<Segment> segs;
  size_t start = 0;
  while (start < d.size()) {
    size_t len = 1;
    while (start + len < d.size() &&
           window_distortion(d, start, len + 1) < tolerance)
      ++len;
    double mean = std::accumulate(d.begin() + long(start),
                                  d.begin() + long(start + len), 0.0) /
                  double(len);
    segs.push_back({uint32_t(start), mean});
    start += len;
  }
  return segs;
}

}  // namespace lpcc
