#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lpcc/geometry.hpp"
#include "lpcc/range_coder.hpp"

namespace lpcc {

/// One node of the breadth-first coded octree. Child order is Morton with z
/// fastest: child k = (x_bit << 2) | (y_bit << 1) | z_bit.
struct OctreeNode {
  Point3 origin;  // min corner
  int log2_size = 0;
  uint32_t depth = 0;
  std::vector<uint32_t> point_indices;
};

struct OccupancyCode {
  uint8_t bits = 0;
};

/// Split a node's points among its 8 children by the coordinate bit at
/// level log2_size - 1. Empty children come back with empty index lists.
std::array<std::vector<uint32_t>, 8> partition(const OctreeNode& node,
                                               const std::vector<Point3>& points);

OccupancyCode occupancy_of(const std::array<std::vector<uint32_t>, 8>& children);

inline Point3 child_origin(const OctreeNode& node, int k) {
  int32_t half = 1 << (node.log2_size - 1);
  return {node.origin.x + ((k >> 2) & 1) * half, node.origin.y + ((k >> 1) & 1) * half,
          node.origin.z + (k & 1) * half};
}

/// 64 adaptive contexts per occupancy bit: count of occupied siblings already
/// coded (0-7) crossed with the child position (0-7).
struct OccupancyContexts {
  BitContext ctx[8][8];
};

void encode_occupancy(RangeEncoder& enc, OccupancyContexts& ctxs, OccupancyCode code);
OccupancyCode decode_occupancy(RangeDecoder& dec, OccupancyContexts& ctxs);

struct LeafContexts {
  BitContext count_prefix[8];
};

/// Lossless leaf payload: point count and the low-order coordinate bits.
void encode_leaf_lossless(RangeEncoder& enc, LeafContexts& ctxs, const OctreeNode& node,
                          const std::vector<Point3>& points);
std::vector<Point3> decode_leaf_lossless(RangeDecoder& dec, LeafContexts& ctxs,
                                         const OctreeNode& node);

/// Lossy leaves carry no payload; the decoder emits the leaf center.
inline Point3 leaf_center(const OctreeNode& node) {
  int32_t half = node.log2_size > 0 ? (1 << (node.log2_size - 1)) : 0;
  return {node.origin.x + half, node.origin.y + half, node.origin.z + half};
}

/// Leaf granularity from the geometry step: leaf side = largest power of two
/// not above max(1, round(q_g)).
int leaf_log2_for(double q_g);

}  // namespace lpcc
