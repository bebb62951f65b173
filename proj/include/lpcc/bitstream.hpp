#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpcc/geometry.hpp"
#include "lpcc/quantizer.hpp"
#include "lpcc/range_coder.hpp"

namespace lpcc {

/// Fixed-size little-endian container header preceding the range-coded
/// payload; see docs/bitstream.md for the byte layout.
struct StreamHeader {
  static constexpr char kMagic[4] = {'L', 'P', 'C', 'C'};
  static constexpr uint8_t kVersion = 1;
  static constexpr uint8_t kFlagLosslessOffsets = 0x01;
  static constexpr uint8_t kFlagLinearEnabled = 0x02;

  BBox bbox;
  float q_g = 1.0f;
  uint16_t q_a = 40;
  uint8_t flags = 0;
  uint32_t point_count = 0;

  bool lossless() const { return flags & kFlagLosslessOffsets; }
  bool linear_enabled() const { return flags & kFlagLinearEnabled; }

  void serialize(std::vector<uint8_t>& out) const;
  /// Parses and validates magic/version; returns bytes consumed.
  static std::pair<StreamHeader, size_t> parse(std::span<const uint8_t> data);
  static constexpr size_t kSize = 4 + 1 + 24 + 4 + 2 + 1 + 4;
};

/// Format cap for the unary-coded per-node line count.
constexpr uint32_t kMaxLinesPerNode = 8;

/// Adaptive contexts for the linear-model payload grammar.
struct LineContexts {
  BitContext mode;
  BitContext line_count;
  BitContext residual;
  BitContext n_prefix[8];
  BitContext a_prefix[8];
  BitContext theta_delta_prefix[8];
  BitContext d_prefix[8];
  BitContext offset_prefix[8];
};

struct LineBits {
  double param_bits = 0;
  double offset_bits = 0;
  double total() const { return param_bits + offset_bits; }
};

/// Per-line payload: N, anchor indices, angles (theta delta-coded against the
/// previous line in the node, exploiting locally parallel lines), mean
/// spacing, optional per-point offsets.
LineBits encode_line_payload(RangeEncoder& enc, LineContexts& ctxs,
                             const QuantizedLine& q, uint32_t q_a, bool offsets,
                             bool has_prev, int32_t prev_theta_idx);
QuantizedLine decode_line_payload(RangeDecoder& dec, LineContexts& ctxs, uint32_t q_a,
                                  bool offsets, bool has_prev, int32_t prev_theta_idx);

void encode_line_count(RangeEncoder& enc, LineContexts& ctxs, uint32_t count);
uint32_t decode_line_count(RangeDecoder& dec, LineContexts& ctxs);

}  // namespace lpcc
