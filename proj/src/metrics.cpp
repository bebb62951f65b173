#include "lpcc/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "lpcc/mathutil.hpp"

namespace lpcc {

KdTree::KdTree(const std::vector<Point3>& points) : pts_(points) {
  if (pts_.empty()) throw EmptyCloud("KdTree: empty point set");
  std::vector<uint32_t> idx(pts_.size());
  std::iota(idx.begin(), idx.end(), 0u);
  nodes_.reserve(pts_.size());
  root_ = build(idx.data(), idx.data() + idx.size(), 0);
}

int32_t KdTree::build(uint32_t* first, uint32_t* last, int depth) {
  if (first >= last) return -1;
  uint8_t axis = uint8_t(depth % 3);
  uint32_t* mid = first + (last - first) / 2;
  std::nth_element(first, mid, last, [&](uint32_t a, uint32_t b) {
    return pts_[a][axis] < pts_[b][axis];
  });
  Node n;
  n.axis = axis;
  n.index = *mid;
  int32_t self = int32_t(nodes_.size());
  nodes_.push_back(n);
  int32_t l = build(first, mid, depth + 1);
  int32_t r = build(mid + 1, last, depth + 1);
  nodes_[self].left = l;
  nodes_[self].right = r;
  return self;
}

std::pair<uint32_t, double> KdTree::nearest(const Vec3R& q) const {
  uint32_t best_idx = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  auto visit = [&](auto&& self, int32_t ni) -> void {
    if (ni < 0) return;
    const Node& n = nodes_[size_t(ni)];
    Vec3R p = to_vec(pts_[n.index]);
    double d2v = (p - q).norm2();
    if (d2v < best_d2 || (d2v == best_d2 && n.index < best_idx)) {
      best_d2 = d2v;
      best_idx = n.index;
    }
    double diff = q[n.axis] - double(pts_[n.index][n.axis]);
    int32_t near = diff < 0 ? n.left : n.right;
    int32_t far = diff < 0 ? n.right : n.left;
    self(self, near);
    // <= so exact-distance ties across the split are still visited and the
    // smallest-index tie-break is deterministic.
    if (diff * diff <= best_d2) self(self, far);
  };
  visit(visit, root_);
  return {best_idx, best_d2};
}

std::vector<uint32_t> KdTree::knearest(const Vec3R& q, uint32_t k) const {
  // max-heap on squared distance
  std::priority_queue<std::pair<double, uint32_t>> heap;
  auto visit = [&](auto&& self, int32_t ni) -> void {
    if (ni < 0) return;
    const Node& n = nodes_[size_t(ni)];
    Vec3R p = to_vec(pts_[n.index]);
    double d2v = (p - q).norm2();
    if (heap.size() < k)
      heap.emplace(d2v, n.index);
    else if (d2v < heap.top().first) {
      heap.pop();
      heap.emplace(d2v, n.index);
    }
    double diff = q[n.axis] - double(pts_[n.index][n.axis]);
    int32_t near = diff < 0 ? n.left : n.right;
    int32_t far = diff < 0 ? n.right : n.left;
    self(self, near);
    if (heap.size() < k || diff * diff < heap.top().first) self(self, far);
  };
  visit(visit, root_);
  std::vector<uint32_t> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top().second);
    heap.pop();
  }
  return out;
}

double d1(const PointCloud& reference, const PointCloud& test) {
  if (reference.points.empty() || test.points.empty())
    throw EmptyCloud("d1: empty cloud");
  KdTree tree(reference.points);
  double sum = 0;
  for (const auto& p : test.points) sum += tree.nearest(to_vec(p)).second;
  return sum / double(test.points.size());
}

double d1_symmetric(const PointCloud& a, const PointCloud& b) {
  return std::max(d1(a, b), d1(b, a));
}

std::vector<Vec3R> estimate_normals(const std::vector<Point3>& points, uint32_t k) {
  KdTree tree(points);
  std::vector<Vec3R> normals(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    auto nn = tree.knearest(to_vec(points[i]), k);
    Vec3R mean{0, 0, 0};
    for (uint32_t j : nn) mean = mean + to_vec(points[j]);
    mean = mean * (1.0 / double(nn.size()));
    double xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;
    for (uint32_t j : nn) {
      Vec3R q = to_vec(points[j]) - mean;
      xx += q.x * q.x;
      yy += q.y * q.y;
      zz += q.z * q.z;
      xy += q.x * q.y;
      xz += q.x * q.z;
      yz += q.y * q.z;
    }
    Eig3 eig = eig3_sym(xx, yy, zz, xy, xz, yz);
    // Rank < 2 neighborhood (collinear or coincident): normal undefined.
    double scale = std::max(std::abs(eig.values[0]), 1e-300);
    if (eig.values[1] / scale < 1e-9)
      normals[i] = {0, 0, 0};
    else
      normals[i] = eig.vectors[2];
  }
  return normals;
}

double d2(const PointCloud& reference, const PointCloud& test, uint32_t normals_k,
          uint32_t* fallback_count) {
  if (reference.points.size() < normals_k)
    throw Error("d2: reference smaller than normals_k");
  if (test.points.empty()) throw EmptyCloud("d2: empty test cloud");
  KdTree tree(reference.points);
  auto normals = estimate_normals(reference.points, normals_k);
  double sum = 0;
  uint32_t fallbacks = 0;
  for (const auto& p : test.points) {
    auto [idx, dist2] = tree.nearest(to_vec(p));
    const Vec3R& n = normals[idx];
    if (n.norm2() < 0.25) {
      sum += dist2;  // degenerate neighborhood: point-to-point fallback
      ++fallbacks;
    } else {
      Vec3R e = to_vec(p) - to_vec(reference.points[idx]);
      double along = e.dot(n);
      sum += along * along;
    }
  }
  if (fallback_count) *fallback_count = fallbacks;
  return sum / double(test.points.size());
}

double d2_symmetric(const PointCloud& a, const PointCloud& b, uint32_t normals_k) {
  return std::max(d2(a, b, normals_k), d2(b, a, normals_k));
}

double geometry_psnr(double mse, double peak) {
  if (mse <= 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(3.0 * peak * peak / mse);
}

DistortionReport evaluate(const PointCloud& reference, const PointCloud& test,
                          uint32_t normals_k, double peak_override) {
  DistortionReport r;
  r.peak = peak_override > 0 ? peak_override : double(reference.bbox.longest_edge());
  r.d1_mse = d1_symmetric(reference, test);
  uint32_t fb1 = 0, fb2 = 0;
  double ab = d2(reference, test, normals_k, &fb1);
  double ba = d2(test, reference, normals_k, &fb2);
  r.d2_mse = std::max(ab, ba);
  r.d2_fallbacks = fb1 + fb2;
  r.d1_psnr = geometry_psnr(r.d1_mse, r.peak);
  r.d2_psnr = geometry_psnr(r.d2_mse, r.peak);
  return r;
}

// ---------------------------------------------------------------------------
// BD-rate
// ---------------------------------------------------------------------------

namespace {

// Least-squares cubic y(x); exact interpolation with 4 samples.
std::array<double, 4> fit_cubic(const std::vector<double>& x,
                                const std::vector<double>& y) {
  double a[4][5] = {};
  for (size_t s = 0; s < x.size(); ++s) {
    double powx[7] = {1, 0, 0, 0, 0, 0, 0};
    for (int i = 1; i < 7; ++i) powx[i] = powx[i - 1] * x[s];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] += powx[r + c];
      a[r][4] += powx[r] * y[s];
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) throw Error("bd_rate: singular fit");
    if (piv != col)
      for (int c = 0; c < 5; ++c) std::swap(a[piv][c], a[col][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return {a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2], a[3][4] / a[3][3]};
}

double integrate_cubic(const std::array<double, 4>& c, double lo, double hi) {
  auto F = [&](double x) {
    return c[0] * x + c[1] * x * x / 2 + c[2] * x * x * x / 3 +
           c[3] * x * x * x * x / 4;
  };
  return F(hi) - F(lo);
}

}  // namespace

double bd_rate(const RdCurve& anchor, const RdCurve& test) {
  auto check = [](const RdCurve& c, const char* name) {
    if (c.points.size() < 4)
      throw Error(std::string("bd_rate: ") + name + " needs >= 4 points");
    for (size_t i = 1; i < c.points.size(); ++i)
      if (!(c.points[i].first > c.points[i - 1].first))
        throw Error(std::string("bd_rate: ") + name + " rates not strictly increasing");
  };
  check(anchor, "anchor");
  check(test, "test");

  auto split = [](const RdCurve& c) {
    std::vector<double> psnr, lograte;
    for (auto [r, p] : c.points) {
      if (!(r > 0)) throw Error("bd_rate: non-positive rate");
      psnr.push_back(p);
      lograte.push_back(std::log10(r));
    }
    return std::pair{psnr, lograte};
  };
  auto [pa, ra] = split(anchor);
  auto [pt, rt] = split(test);

  double lo = std::max(*std::min_element(pa.begin(), pa.end()),
                       *std::min_element(pt.begin(), pt.end()));
  double hi = std::min(*std::max_element(pa.begin(), pa.end()),
                       *std::max_element(pt.begin(), pt.end()));
  if (!(hi > lo)) throw Error("bd_rate: no PSNR overlap");

  auto ca = fit_cubic(pa, ra);
  auto ct = fit_cubic(pt, rt);
  double avg = (integrate_cubic(ct, lo, hi) - integrate_cubic(ca, lo, hi)) / (hi - lo);
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

}  // namespace lpcc
