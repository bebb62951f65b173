#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lpcc/geometry.hpp"

namespace lpcc {

/// Adaptive binary context: 12-bit probability of bit 0, shift-based update.
struct BitContext {
  uint16_t p0 = 2048;
};

namespace rc_detail {
constexpr uint32_t kTop = 1u << 24;
constexpr int kProbBits = 12;
constexpr int kAdaptShift = 5;
}  // namespace rc_detail

/// Byte-oriented binary range coder (carry-less via cache byte, LZMA style).
/// Tracks a fractional bit count so a probe pass and the real emission report
/// identical sizes for identical context state.
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<uint8_t>& out) : out_(&out) {}

  void encode_bit(BitContext& ctx, int bit) {
    uint32_t bound = (range_ >> rc_detail::kProbBits) * ctx.p0;
    if (bit == 0) {
      bits_ += cost_of(ctx.p0);
      range_ = bound;
      ctx.p0 += (4096 - ctx.p0) >> rc_detail::kAdaptShift;
    } else {
      bits_ += cost_of(4096 - ctx.p0);
      low_ += bound;
      range_ -= bound;
      ctx.p0 -= ctx.p0 >> rc_detail::kAdaptShift;
    }
    normalize();
  }

  void encode_bypass(int bit) {
    range_ >>= 1;
    if (bit) low_ += range_;
    bits_ += 1.0;
    normalize();
  }

  /// n bypass bits, most significant first.
  void encode_bypass_bits(uint32_t v, int n) {
    for (int i = n - 1; i >= 0; --i) encode_bypass((v >> i) & 1);
  }

  /// Order-k Exp-Golomb, bypass-coded.
  void encode_uint_eg(int k, uint64_t v) {
    uint64_t q = v >> k;
    uint64_t u = q + 1;
    int n = std::bit_width(u);
    for (int i = 0; i < n - 1; ++i) encode_bypass(0);
    for (int i = n - 1; i >= 0; --i) encode_bypass(int((u >> i) & 1));
    for (int i = k - 1; i >= 0; --i) encode_bypass(int((v >> i) & 1));
  }

  /// Order-k Exp-Golomb with the unary zero-prefix context-coded.
  void encode_uint_eg_ctx(int k, uint64_t v, std::span<BitContext> prefix_ctx) {
    uint64_t q = v >> k;
    uint64_t u = q + 1;
    int n = std::bit_width(u);
    for (int i = 0; i < n - 1; ++i)
      encode_bit(prefix_ctx[std::min<size_t>(i, prefix_ctx.size() - 1)], 0);
    encode_bit(prefix_ctx[std::min<size_t>(n - 1, prefix_ctx.size() - 1)], 1);
    for (int i = n - 2; i >= 0; --i) encode_bypass(int((u >> i) & 1));
    for (int i = k - 1; i >= 0; --i) encode_bypass(int((v >> i) & 1));
  }

  static uint64_t zigzag(int64_t v) {
    return (uint64_t(v) << 1) ^ uint64_t(v >> 63);
  }
  static int64_t unzigzag(uint64_t u) {
    return int64_t(u >> 1) ^ -int64_t(u & 1);
  }

  void encode_sint_eg(int k, int64_t v) { encode_uint_eg(k, zigzag(v)); }

  void flush() {
    for (int i = 0; i < 5; ++i) shift_low();
    // Drain a deferred carry run so writer and reader byte counts agree.
    if (cache_size_ > 1) {
      uint8_t t = cache_;
      while (--cache_size_) {
        out_->push_back(t);
        t = 0xFF;
      }
      cache_size_ = 1;
    }
  }

  /// Fractional bits accumulated so far (exact function of context states).
  double bits() const { return bits_; }

 private:
  static double cost_of(uint32_t prob) {
    return -std::log2(double(prob) / 4096.0);
  }

  void normalize() {
    while (range_ < rc_detail::kTop) {
      shift_low();
      range_ <<= 8;
    }
  }

  void shift_low() {
    if (uint32_t(low_) < 0xFF000000u || (low_ >> 32) != 0) {
      uint8_t carry = uint8_t(low_ >> 32);
      uint8_t t = cache_;
      do {
        out_->push_back(uint8_t(t + carry));
        t = 0xFF;
      } while (--cache_size_);
      cache_ = uint8_t(uint32_t(low_) >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
  }

  std::vector<uint8_t>* out_;
  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  double bits_ = 0;
};

class RangeDecoder {
 public:
  RangeDecoder(const uint8_t* data, size_t size) : data_(data), size_(size) {
    for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | read_byte();
  }
  explicit RangeDecoder(std::span<const uint8_t> data)
      : RangeDecoder(data.data(), data.size()) {}

  int decode_bit(BitContext& ctx) {
    uint32_t bound = (range_ >> rc_detail::kProbBits) * ctx.p0;
    int bit;
    if (code_ < bound) {
      bit = 0;
      range_ = bound;
      ctx.p0 += (4096 - ctx.p0) >> rc_detail::kAdaptShift;
    } else {
      bit = 1;
      code_ -= bound;
      range_ -= bound;
      ctx.p0 -= ctx.p0 >> rc_detail::kAdaptShift;
    }
    normalize();
    return bit;
  }

  int decode_bypass() {
    range_ >>= 1;
    int bit = 0;
    if (code_ >= range_) {
      code_ -= range_;
      bit = 1;
    }
    normalize();
    return bit;
  }

  uint32_t decode_bypass_bits(int n) {
    uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | uint32_t(decode_bypass());
    return v;
  }

  uint64_t decode_uint_eg(int k) {
    int zeros = 0;
    while (decode_bypass() == 0) {
      if (++zeros > 64) throw DecodeError("exp-golomb prefix overrun");
    }
    uint64_t u = 1;
    for (int i = 0; i < zeros; ++i) u = (u << 1) | uint64_t(decode_bypass());
    uint64_t q = u - 1;
    uint64_t r = 0;
    for (int i = 0; i < k; ++i) r = (r << 1) | uint64_t(decode_bypass());
    return (q << k) | r;
  }

  uint64_t decode_uint_eg_ctx(int k, std::span<BitContext> prefix_ctx) {
    int zeros = 0;
    while (decode_bit(prefix_ctx[std::min<size_t>(zeros, prefix_ctx.size() - 1)]) == 0) {
      if (++zeros > 64) throw DecodeError("exp-golomb prefix overrun");
    }
    uint64_t u = 1;
    for (int i = 0; i < zeros; ++i) u = (u << 1) | uint64_t(decode_bypass());
    uint64_t q = u - 1;
    uint64_t r = 0;
    for (int i = 0; i < k; ++i) r = (r << 1) | uint64_t(decode_bypass());
    return (q << k) | r;
  }

  int64_t decode_sint_eg(int k) {
    return RangeEncoder::unzigzag(decode_uint_eg(k));
  }

  /// Bytes consumed so far; equals the stream size after a clean decode.
  size_t consumed() const { return pos_; }
  size_t stream_size() const { return size_; }

 private:
  uint8_t read_byte() {
    if (pos_ >= size_) throw DecodeError("bitstream exhausted");
    return data_[pos_++];
  }

  void normalize() {
    while (range_ < rc_detail::kTop) {
      code_ = (code_ << 8) | read_byte();
      range_ <<= 8;
    }
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint32_t code_ = 0;
};

}  // namespace lpcc
