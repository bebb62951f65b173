#pragma once

#include <utility>

#include "lpcc/geometry.hpp"

namespace lpcc {

struct Eig3 {
  // Eigenvalues in descending order with unit eigenvectors.
  double values[3];
  Vec3R vectors[3];
};

/// Closed-form eigendecomposition of a symmetric 3x3 matrix given as
/// (xx, yy, zz, xy, xz, yz), via the characteristic polynomial.
/// Deterministic tie-break (largest-|component| axis) when eigenvalues
/// coincide within 1e-9 relative.
Eig3 eig3_sym(double xx, double yy, double zz, double xy, double xz, double yz);

/// Canonical representative of a direction-symmetric line direction:
/// negate b when b_z < 0, or b_z == 0 and the in-plane angle is negative.
/// Resulting theta lies in [0, pi] whenever phi == 0.
inline Vec3R canonicalize_direction(const Vec3R& b) {
  if (b.z < 0 || (b.z == 0 && (b.y < 0 || (b.y == 0 && b.x < 0)))) return -b;
  return b;
}

/// Orthonormal basis (u, v) of the plane orthogonal to unit vector b.
/// Deterministic: seeded from the axis least aligned with b.
std::pair<Vec3R, Vec3R> orthonormal_basis(const Vec3R& b);

}  // namespace lpcc
