#include "lpcc/mathutil.hpp"

#include <cmath>

namespace lpcc {

namespace {

// Eigenvector of (A - lambda I) by cross products of its rows; the two rows
// with the largest cross-product norm give a stable null-space direction.
Vec3R eigenvector_for(double xx, double yy, double zz, double xy, double xz,
                      double yz, double lambda) {
  Vec3R r0{xx - lambda, xy, xz};
  Vec3R r1{xy, yy - lambda, yz};
  Vec3R r2{xz, yz, zz - lambda};
  Vec3R c01 = r0.cross(r1);
  Vec3R c02 = r0.cross(r2);
  Vec3R c12 = r1.cross(r2);
  double n01 = c01.norm2(), n02 = c02.norm2(), n12 = c12.norm2();
  Vec3R best = c01;
  double nbest = n01;
  if (n02 > nbest) {
    best = c02;
    nbest = n02;
  }
  if (n12 > nbest) {
    best = c12;
    nbest = n12;
  }
  if (nbest <= 0) return {0, 0, 0};  // degenerate, caller handles tie-break
  return best * (1.0 / std::sqrt(nbest));
}

}  // namespace

Eig3 eig3_sym(double xx, double yy, double zz, double xy, double xz, double yz) {
  Eig3 out{};
  double p1 = xy * xy + xz * xz + yz * yz;
  double scale = std::max({std::abs(xx), std::abs(yy), std::abs(zz),
                           std::abs(xy), std::abs(xz), std::abs(yz), 1e-300});

  if (p1 / (scale * scale) < 1e-28) {
    // Effectively diagonal.
    int order[3] = {0, 1, 2};
    double d[3] = {xx, yy, zz};
    if (d[order[0]] < d[order[1]]) std::swap(order[0], order[1]);
    if (d[order[1]] < d[order[2]]) std::swap(order[1], order[2]);
    if (d[order[0]] < d[order[1]]) std::swap(order[0], order[1]);
    for (int i = 0; i < 3; ++i) {
      out.values[i] = d[order[i]];
      out.vectors[i] = Vec3R{order[i] == 0 ? 1.0 : 0.0, order[i] == 1 ? 1.0 : 0.0,
                             order[i] == 2 ? 1.0 : 0.0};
    }
    return out;
  }

  double q = (xx + yy + zz) / 3.0;
  double p2 = (xx - q) * (xx - q) + (yy - q) * (yy - q) + (zz - q) * (zz - q) +
              2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  // B = (A - qI) / p
  double bxx = (xx - q) / p, byy = (yy - q) / p, bzz = (zz - q) / p;
  double bxy = xy / p, bxz = xz / p, byz = yz / p;
  double detB = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                bxz * (bxy * byz - byy * bxz);
  double r = std::clamp(detB / 2.0, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;

  double e0 = q + 2.0 * p * std::cos(phi);
  double e2 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  double e1 = 3.0 * q - e0 - e2;
  out.values[0] = e0;
  out.values[1] = e1;
  out.values[2] = e2;

  double tol = 1e-9 * std::max(std::abs(e0), 1e-300);
  for (int i = 0; i < 3; ++i) {
    Vec3R v = eigenvector_for(xx, yy, zz, xy, xz, yz, out.values[i]);
    bool repeated = (i > 0 && std::abs(out.values[i] - out.values[i - 1]) <= tol) ||
                    (i < 2 && std::abs(out.values[i] - out.values[i + 1]) <= tol);
    if (v.norm2() < 0.25 || (repeated && i > 0)) {
      // Repeated eigenvalue: fixed tie-break, orthogonalize against the
      // already-chosen vectors starting from the largest-|component| axis.
      Vec3R prev0 = i > 0 ? out.vectors[0] : Vec3R{0, 0, 0};
      Vec3R prev1 = i > 1 ? out.vectors[1] : Vec3R{0, 0, 0};
      Vec3R cand{0, 0, 0};
      double bestn = -1;
      for (int ax = 0; ax < 3; ++ax) {
        Vec3R e{ax == 0 ? 1.0 : 0.0, ax == 1 ? 1.0 : 0.0, ax == 2 ? 1.0 : 0.0};
        Vec3R w = e - prev0 * e.dot(prev0) - prev1 * e.dot(prev1);
        if (w.norm2() > bestn) {
          bestn = w.norm2();
          cand = w;
        }
      }
      v = cand.normalized();
    }
    out.vectors[i] = v;
  }
  return out;
}

std::pair<Vec3R, Vec3R> orthonormal_basis(const Vec3R& b) {
  // Seed axis: the one least aligned with b.
  double ax = std::abs(b.x), ay = std::abs(b.y), az = std::abs(b.z);
  Vec3R seed = (ax <= ay && ax <= az)   ? Vec3R{1, 0, 0}
               : (ay <= ax && ay <= az) ? Vec3R{0, 1, 0}
                                        : Vec3R{0, 0, 1};
  Vec3R u = b.cross(seed).normalized();
  Vec3R v = b.cross(u);
  return {u, v};
}

}  // namespace lpcc
