#include "lpcc/octree.hpp"

#include <bit>

namespace lpcc {

std::array<std::vector<uint32_t>, 8> partition(const OctreeNode& node,
                                               const std::vector<Point3>& points) {
  if (node.log2_size < 1) throw Error("partition: node is a unit voxel");
  std::array<std::vector<uint32_t>, 8> children;
  const int shift = node.log2_size - 1;
  const int32_t size = 1 << node.log2_size;
  for (uint32_t idx : node.point_indices) {
    Point3 rel = points[idx] - node.origin;
    if (rel.x < 0 || rel.y < 0 || rel.z < 0 || rel.x >= size || rel.y >= size ||
        rel.z >= size)
      throw Error("partition: point outside node bounds");
    int k = (((rel.x >> shift) & 1) << 2) | (((rel.y >> shift) & 1) << 1) |
            ((rel.z >> shift) & 1);
    children[size_t(k)].push_back(idx);
  }
  return children;
}

OccupancyCode occupancy_of(const std::array<std::vector<uint32_t>, 8>& children) {
  uint8_t bits = 0;
  for (int k = 0; k < 8; ++k)
    if (!children[size_t(k)].empty()) bits |= uint8_t(1 << k);
  if (bits == 0) throw Error("occupancy_of: all children empty");
  return {bits};
}

void encode_occupancy(RangeEncoder& enc, OccupancyContexts& ctxs, OccupancyCode code) {
  for (int k = 0; k < 8; ++k) {
    int prior = std::popcount(uint8_t(code.bits & ((1u << k) - 1)));
    enc.encode_bit(ctxs.ctx[prior][k], (code.bits >> k) & 1);
  }
}

OccupancyCode decode_occupancy(RangeDecoder& dec, OccupancyContexts& ctxs) {
  uint8_t bits = 0;
  for (int k = 0; k < 8; ++k) {
    int prior = std::popcount(bits);
    if (dec.decode_bit(ctxs.ctx[prior][k])) bits |= uint8_t(1 << k);
  }
  if (bits == 0) throw DecodeError("decoded all-empty occupancy code");
  return {bits};
}

void encode_leaf_lossless(RangeEncoder& enc, LeafContexts& ctxs, const OctreeNode& node,
                          const std::vector<Point3>& points) {
  enc.encode_uint_eg_ctx(0, node.point_indices.size() - 1, ctxs.count_prefix);
  const int bits = node.log2_size;
  for (uint32_t idx : node.point_indices) {
    Point3 rel = points[idx] - node.origin;
    enc.encode_bypass_bits(uint32_t(rel.x), bits);
    enc.encode_bypass_bits(uint32_t(rel.y), bits);
    enc.encode_bypass_bits(uint32_t(rel.z), bits);
  }
}

std::vector<Point3> decode_leaf_lossless(RangeDecoder& dec, LeafContexts& ctxs,
                                         const OctreeNode& node) {
  uint64_t count = dec.decode_uint_eg_ctx(0, ctxs.count_prefix) + 1;
  const int bits = node.log2_size;
  std::vector<Point3> out;
  out.reserve(std::min<uint64_t>(count, 1u << 16));
  for (uint64_t i = 0; i < count; ++i) {
    int32_t x = int32_t(dec.decode_bypass_bits(bits));
    int32_t y = int32_t(dec.decode_bypass_bits(bits));
    int32_t z = int32_t(dec.decode_bypass_bits(bits));
    out.push_back({node.origin.x + x, node.origin.y + y, node.origin.z + z});
  }
  return out;
}

int leaf_log2_for(double q_g) {
  int32_t s = std::max<int32_t>(1, round_away(q_g));
  return std::bit_width(uint32_t(s)) - 1;
}

}  // namespace lpcc
