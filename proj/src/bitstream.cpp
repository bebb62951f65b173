#include "lpcc/bitstream.hpp"

#include <bit>
#include <cstring>

namespace lpcc {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 24));
}
void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v));
  out.push_back(uint8_t(v >> 8));
}
uint32_t get_u32(const uint8_t* p) {
  return uint32_t(p[0]) | (uint32_t(p[1]) << 8) | (uint32_t(p[2]) << 16) |
         (uint32_t(p[3]) << 24);
}

int theta_raw_bits(int32_t phi_idx, uint32_t q_a) {
  // phi == 0 restricts theta to [0, pi]; otherwise the offset index spans
  // [0, 4 q_a].
  uint32_t maxval = phi_idx == 0 ? 2 * q_a : 4 * q_a;
  return std::bit_width(maxval);
}

}  // namespace

void StreamHeader::serialize(std::vector<uint8_t>& out) const {
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  for (int32_t v : {bbox.min.x, bbox.min.y, bbox.min.z, bbox.max.x, bbox.max.y,
                    bbox.max.z})
    put_u32(out, uint32_t(v));
  uint32_t qg_bits;
  std::memcpy(&qg_bits, &q_g, 4);
  put_u32(out, qg_bits);
  put_u16(out, q_a);
  out.push_back(flags);
  put_u32(out, point_count);
}

std::pair<StreamHeader, size_t> StreamHeader::parse(std::span<const uint8_t> data) {
  if (data.size() < kSize) throw DecodeError("stream shorter than header");
  if (std::memcmp(data.data(), kMagic, 4) != 0)
    throw DecodeError("bad magic, not an LPCC stream");
  if (data[4] != kVersion)
    throw DecodeError("unsupported stream version " + std::to_string(data[4]));
  StreamHeader h;
  const uint8_t* p = data.data() + 5;
  int32_t v[6];
  for (int i = 0; i < 6; ++i) {
    v[i] = int32_t(get_u32(p));
    p += 4;
  }
  h.bbox.min = {v[0], v[1], v[2]};
  h.bbox.max = {v[3], v[4], v[5]};
  uint32_t qg_bits = get_u32(p);
  p += 4;
  std::memcpy(&h.q_g, &qg_bits, 4);
  h.q_a = uint16_t(p[0] | (p[1] << 8));
  p += 2;
  h.flags = *p++;
  h.point_count = get_u32(p);
  if (!(h.q_g > 0) || h.q_a == 0) throw DecodeError("invalid quantization fields");
  return {h, kSize};
}

void encode_line_count(RangeEncoder& enc, LineContexts& ctxs, uint32_t count) {
  // count in [1, kMaxLinesPerNode], unary-capped.
  for (uint32_t i = 1; i < count; ++i) enc.encode_bit(ctxs.line_count, 1);
  if (count < kMaxLinesPerNode) enc.encode_bit(ctxs.line_count, 0);
}

uint32_t decode_line_count(RangeDecoder& dec, LineContexts& ctxs) {
  uint32_t count = 1;
  while (count < kMaxLinesPerNode && dec.decode_bit(ctxs.line_count)) ++count;
  return count;
}

LineBits encode_line_payload(RangeEncoder& enc, LineContexts& ctxs,
                             const QuantizedLine& q, uint32_t q_a, bool offsets,
                             bool has_prev, int32_t prev_theta_idx) {
  LineBits bits;
  double start = enc.bits();
  enc.encode_uint_eg_ctx(2, q.n, ctxs.n_prefix);
  for (int ax = 0; ax < 3; ++ax)
    enc.encode_uint_eg_ctx(2, RangeEncoder::zigzag(q.a_idx[ax]), ctxs.a_prefix);
  enc.encode_bypass_bits(uint32_t(q.phi_idx), std::bit_width(q_a));
  if (q.phi_idx != int32_t(q_a)) {
    if (has_prev) {
      enc.encode_uint_eg_ctx(0, RangeEncoder::zigzag(q.theta_idx - prev_theta_idx),
                             ctxs.theta_delta_prefix);
    } else {
      uint32_t off = uint32_t(q.phi_idx == 0 ? q.theta_idx
                                             : q.theta_idx + 2 * int32_t(q_a));
      enc.encode_bypass_bits(off, theta_raw_bits(q.phi_idx, q_a));
    }
  }
  if (q.n >= 2) enc.encode_uint_eg_ctx(1, uint64_t(q.d_idx), ctxs.d_prefix);
  bits.param_bits = enc.bits() - start;

  if (offsets) {
    if (!q.offset_indices || q.offset_indices->size() != q.n)
      throw Error("encode_line_payload: missing offsets in offset-coded stream");
    start = enc.bits();
    for (const auto& o : *q.offset_indices)
      for (int ax = 0; ax < 3; ++ax)
        enc.encode_uint_eg_ctx(0, RangeEncoder::zigzag(o[ax]), ctxs.offset_prefix);
    bits.offset_bits = enc.bits() - start;
  }
  return bits;
}

QuantizedLine decode_line_payload(RangeDecoder& dec, LineContexts& ctxs, uint32_t q_a,
                                  bool offsets, bool has_prev, int32_t prev_theta_idx) {
  QuantizedLine q;
  uint64_t n = dec.decode_uint_eg_ctx(2, ctxs.n_prefix);
  if (n == 0 || n > (1u << 24)) throw DecodeError("implausible line point count");
  q.n = uint32_t(n);
  for (int ax = 0; ax < 3; ++ax)
    q.a_idx[ax] = int32_t(RangeEncoder::unzigzag(dec.decode_uint_eg_ctx(2, ctxs.a_prefix)));
  q.phi_idx = int32_t(dec.decode_bypass_bits(std::bit_width(q_a)));
  if (q.phi_idx > int32_t(q_a)) throw DecodeError("phi index out of range");
  if (q.phi_idx == int32_t(q_a)) {
    q.theta_idx = 0;
  } else if (has_prev) {
    q.theta_idx = prev_theta_idx +
                  int32_t(RangeEncoder::unzigzag(
                      dec.decode_uint_eg_ctx(0, ctxs.theta_delta_prefix)));
  } else {
    uint32_t off = dec.decode_bypass_bits(theta_raw_bits(q.phi_idx, q_a));
    q.theta_idx = q.phi_idx == 0 ? int32_t(off) : int32_t(off) - 2 * int32_t(q_a);
  }
  if (q.theta_idx < -2 * int32_t(q_a) || q.theta_idx > 2 * int32_t(q_a))
    throw DecodeError("theta index out of range");
  if (q.n >= 2) q.d_idx = int64_t(dec.decode_uint_eg_ctx(1, ctxs.d_prefix));
  if (offsets) {
    std::vector<std::array<int32_t, 3>> offs;
    offs.reserve(q.n);
    for (uint32_t i = 0; i < q.n; ++i) {
      std::array<int32_t, 3> o;
      for (int ax = 0; ax < 3; ++ax)
        o[size_t(ax)] = int32_t(
            RangeEncoder::unzigzag(dec.decode_uint_eg_ctx(0, ctxs.offset_prefix)));
      offs.push_back(o);
    }
    q.offset_indices = std::move(offs);
  }
  return q;
}

}  // namespace lpcc
