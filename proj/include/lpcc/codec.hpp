#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lpcc/bitstream.hpp"
#include "lpcc/linemodel.hpp"
#include "lpcc/quantizer.hpp"
#include "lpcc/rdo.hpp"

namespace lpcc {

struct EncoderConfig {
  QuantConfig quant;
  RdoConfig rdo;
  DetectorConfig detector;
  bool linear_enabled = true;
  bool lossless = false;
};

struct EncodeStats {
  uint64_t nodes_total = 0;
  uint64_t nodes_linear = 0;
  uint64_t lines_coded = 0;
  uint64_t points_by_linear = 0;
  uint64_t points_by_octree = 0;
  std::map<std::string, double> bits_by_category;
  std::vector<double> candidate_rds;   // every scored candidate, accepted or not
  std::vector<double> candidate_psnr;  // P_l of each candidate
  std::vector<double> candidate_rate;  // R_l (bits per member point) of each

  std::string to_json() const;
};

/// Encode a cloud into a self-contained stream. Every input point is covered
/// exactly once, by a line membership or by the octree residual path.
std::pair<std::vector<uint8_t>, EncodeStats> encode(const PointCloud& cloud,
                                                    const EncoderConfig& cfg);

/// Octree-only coder (no mode bits in the payload). encode() with
/// linear_enabled = false produces this stream byte for byte.
std::pair<std::vector<uint8_t>, EncodeStats> encode_octree_only(
    const PointCloud& cloud, const EncoderConfig& cfg);

PointCloud decode(std::span<const uint8_t> stream);

/// Full-RDO score of one quantized candidate: exact probe-coded bits and the
/// point-to-point PSNR of its reconstruction against the member points.
RdScore score_linear(const std::vector<Vec3R>& local_points, const Line& line,
                     const QuantizedLine& qline, const QuantConfig& quant,
                     double peak, const LineContexts& ctxs, bool offsets,
                     bool has_prev, int32_t prev_theta_idx);

}  // namespace lpcc
