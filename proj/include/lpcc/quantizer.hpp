#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lpcc/linemodel.hpp"

namespace lpcc {

/// Quantization steps. The mean-spacing step shrinks with the member count
/// because spacing errors accumulate along the line.
struct QuantConfig {
  double q_g = 1.0;    // geometry step, voxels
  uint32_t q_a = 40;   // angular resolution
  double q_r = 0.0;    // offset step; 0 means exact integer residuals (lossless)

  double q_s() const { return q_g; }
  double q_d(uint32_t n) const { return n > 1 ? q_g / double(n - 1) : q_g; }
  double phi_step() const { return (M_PI / 2.0) / double(q_a); }
  double theta_step() const { return (2.0 * M_PI) / double(4 * q_a); }
};

struct QuantizedLine {
  int32_t a_idx[3] = {0, 0, 0};
  int32_t theta_idx = 0;
  int32_t phi_idx = 0;
  int64_t d_idx = 0;
  uint32_t n = 0;
  std::optional<std::vector<std::array<int32_t, 3>>> offset_indices;
};

/// Spherical angles of a canonical direction: theta in [-pi, pi],
/// phi in [0, pi/2]; theta in [0, pi] when phi == 0; theta = 0 at the pole.
std::pair<double, double> to_spherical(const Vec3R& b);

/// Uniform angle grid; phi step == theta step == pi / (2 q_a).
std::pair<int32_t, int32_t> quantize_angles(double theta, double phi, uint32_t q_a);
std::pair<double, double> dequantize_angles(int32_t theta_idx, int32_t phi_idx,
                                            uint32_t q_a);
Vec3R direction_from_angles(double theta, double phi);

/// Quantize line parameters (even mode). When `points` is given, offsets are
/// computed against the quantized reconstruction: exact integer residuals at
/// q_r == 0, otherwise rounded with step q_r. If the quantized direction flips
/// (equator wrap), the member order is reversed and the anchor moves to the
/// other end; `line`/`proj` are updated accordingly.
QuantizedLine quantize_line(Line& line, ProjectionParams& proj, const QuantConfig& cfg,
                            const std::vector<Vec3R>* points = nullptr);

struct DequantizedLine {
  Vec3R a;
  Vec3R b;
  double d = 0;
  uint32_t n = 0;
};

DequantizedLine dequantize_line(const QuantizedLine& q, const QuantConfig& cfg);

/// Reconstruct member positions: a + (i-1) d b, plus offsets when present.
std::vector<Vec3R> reconstruct(const QuantizedLine& q, const QuantConfig& cfg);

/// Same, rounded to the voxel grid (the decoder's final step).
std::vector<Point3> reconstruct_voxels(const QuantizedLine& q, const QuantConfig& cfg);

}  // namespace lpcc
