#include "lpcc/codec.hpp"

#include <bit>
#include <cmath>
#include <deque>
#include <numeric>

#include "json.hpp"
#include "lpcc/metrics.hpp"
#include "lpcc/octree.hpp"

namespace lpcc {

namespace {

struct CodecContexts {
  OccupancyContexts occ;
  LeafContexts leaf;
  LineContexts line;
};

int root_log2(const BBox& bbox, int leaf_l2) {
  Point3 e = bbox.extent();
  uint32_t m = uint32_t(std::max({e.x, e.y, e.z, 0}));
  return std::max<int>(std::bit_width(m), leaf_l2);
}

struct AcceptedLine {
  QuantizedLine q;
  double probe_bits = 0;
};

struct LinearPlan {
  std::vector<AcceptedLine> lines;
  std::vector<uint32_t> claimed;  // global indices, sorted
};

/// Detect, trim, quantize and score candidates for one node; accepted lines
/// claim their members so the octree continues with the complement.
LinearPlan plan_linear(const OctreeNode& node, const std::vector<Point3>& rel,
                       const EncoderConfig& cfg, double peak,
                       const LineContexts& live_ctx, EncodeStats& stats) {
  LinearPlan plan;
  if (!eligible(node.point_indices.size(), node.depth, cfg.detector)) return plan;

  std::vector<Vec3R> local;
  local.reserve(node.point_indices.size());
  for (uint32_t gi : node.point_indices)
    local.push_back(to_vec(rel[gi] - node.origin));

  auto candidates = hough_detect(local, cfg.detector);
  if (candidates.empty()) return plan;

  const uint32_t cap = std::min(cfg.detector.max_lines_per_node, kMaxLinesPerNode);
  const uint32_t min_pts = std::max(2u, cfg.detector.min_points);
  std::vector<char> claimed_local(local.size(), 0);
  LineContexts tctx = live_ctx;  // tracks the would-be emission context state
  bool has_prev = false;
  int32_t prev_theta = 0;

  for (const auto& cand : candidates) {
    if (plan.lines.size() >= cap) break;
    std::vector<uint32_t> members;
    for (uint32_t li : cand.inliers)
      if (!claimed_local[li]) members.push_back(li);
    if (members.size() < min_pts) continue;

    Vec3R a, b;
    try {
      std::vector<Vec3R> sel;
      sel.reserve(members.size());
      for (uint32_t li : members) sel.push_back(local[li]);
      std::tie(a, b) = fit_line_pca(sel);
    } catch (const DegenerateLine&) {
      continue;
    }
    auto [line, proj] = project_and_order(local, members, a, b);

    // Fast RDO: keep the longest window whose average spacing distortion is
    // within tolerance, then re-anchor on the trimmed subset.
    if (!proj.d.empty()) {
      SubsetChoice sub = fast_subset(proj.d, cfg.rdo.d_c_bar);
      if (!sub.feasible) continue;
      if (sub.j - sub.i + 1 < line.count()) {
        std::vector<uint32_t> trimmed(line.member_indices.begin() + (sub.i - 1),
                                      line.member_indices.begin() + sub.j);
        if (trimmed.size() < min_pts) continue;
        std::tie(line, proj) = project_and_order(local, std::move(trimmed), line.a, line.b);
      }
    }

    QuantizedLine qline =
        quantize_line(line, proj, cfg.quant, cfg.lossless ? &local : nullptr);
    RdScore score = score_linear(local, line, qline, cfg.quant, peak, tctx,
                                 cfg.lossless, has_prev, prev_theta);
    double rds = score.rds_at(cfg.rdo.lambda);
    stats.candidate_rds.push_back(rds);
    stats.candidate_psnr.push_back(score.p_l);
    stats.candidate_rate.push_back(score.r_l);
    if (decide_mode(rds, cfg.rdo.threshold) != Mode::LinearModel) continue;

    // Commit the context updates the real emission will replay.
    {
      std::vector<uint8_t> sink;
      RangeEncoder probe(sink);
      encode_line_payload(probe, tctx, qline, cfg.quant.q_a, cfg.lossless, has_prev,
                          prev_theta);
    }
    prev_theta = qline.theta_idx;
    has_prev = true;
    for (uint32_t li : line.member_indices) claimed_local[li] = 1;
    plan.lines.push_back({qline, score.bits_total});
  }

  for (size_t li = 0; li < claimed_local.size(); ++li)
    if (claimed_local[li]) plan.claimed.push_back(node.point_indices[li]);
  std::sort(plan.claimed.begin(), plan.claimed.end());
  return plan;
}

std::pair<std::vector<uint8_t>, EncodeStats> encode_impl(const PointCloud& cloud,
                                                         const EncoderConfig& cfg,
                                                         bool linear) {
  if (cloud.points.empty()) throw EmptyCloud("encode: empty cloud");
  QuantConfig quant = cfg.quant;
  if (cfg.lossless) quant.q_r = 0;

  EncodeStats stats;
  StreamHeader h;
  h.bbox = cloud.bbox;
  h.q_g = float(quant.q_g);
  h.q_a = uint16_t(quant.q_a);
  h.flags = uint8_t((cfg.lossless ? StreamHeader::kFlagLosslessOffsets : 0) |
                    (linear ? StreamHeader::kFlagLinearEnabled : 0));
  h.point_count = uint32_t(cloud.points.size());

  std::vector<uint8_t> out;
  h.serialize(out);
  stats.bits_by_category["header"] = double(out.size()) * 8.0;

  std::vector<Point3> rel;
  rel.reserve(cloud.points.size());
  for (const auto& p : cloud.points) rel.push_back(p - cloud.bbox.min);

  const int leaf_l2 = leaf_log2_for(quant.q_g);
  const int top = root_log2(cloud.bbox, leaf_l2);
  const double peak = std::max<double>(1.0, double(cloud.bbox.longest_edge()));

  RangeEncoder enc(out);
  CodecContexts ctx;
  EncoderConfig ecfg = cfg;
  ecfg.quant = quant;

  std::deque<OctreeNode> queue;
  {
    OctreeNode root;
    root.origin = {0, 0, 0};
    root.log2_size = top;
    root.depth = 0;
    root.point_indices.resize(rel.size());
    std::iota(root.point_indices.begin(), root.point_indices.end(), 0u);
    queue.push_back(std::move(root));
  }

  auto add_bits = [&](const char* cat, double v) { stats.bits_by_category[cat] += v; };

  while (!queue.empty()) {
    OctreeNode node = std::move(queue.front());
    queue.pop_front();
    ++stats.nodes_total;

    if (node.log2_size == leaf_l2) {
      if (cfg.lossless) {
        double b0 = enc.bits();
        encode_leaf_lossless(enc, ctx.leaf, node, rel);
        add_bits("leaf", enc.bits() - b0);
      }
      stats.points_by_octree += node.point_indices.size();
      continue;
    }

    if (linear) {
      LinearPlan plan = plan_linear(node, rel, ecfg, peak, ctx.line, stats);
      double b0 = enc.bits();
      enc.encode_bit(ctx.line.mode, plan.lines.empty() ? 0 : 1);
      add_bits("mode", enc.bits() - b0);
      if (!plan.lines.empty()) {
        ++stats.nodes_linear;
        b0 = enc.bits();
        encode_line_count(enc, ctx.line, uint32_t(plan.lines.size()));
        add_bits("line_count", enc.bits() - b0);
        bool has_prev = false;
        int32_t prev_theta = 0;
        for (const auto& al : plan.lines) {
          LineBits lb = encode_line_payload(enc, ctx.line, al.q, quant.q_a,
                                            cfg.lossless, has_prev, prev_theta);
          add_bits("line_params", lb.param_bits);
          add_bits("offsets", lb.offset_bits);
          prev_theta = al.q.theta_idx;
          has_prev = true;
          ++stats.lines_coded;
          stats.points_by_linear += al.q.n;
        }
        // Octree continues with the unclaimed complement.
        std::vector<uint32_t> residual;
        residual.reserve(node.point_indices.size() - plan.claimed.size());
        std::vector<uint32_t> sorted_all = node.point_indices;
        std::sort(sorted_all.begin(), sorted_all.end());
        std::set_difference(sorted_all.begin(), sorted_all.end(), plan.claimed.begin(),
                            plan.claimed.end(), std::back_inserter(residual));
        b0 = enc.bits();
        enc.encode_bit(ctx.line.residual, residual.empty() ? 0 : 1);
        add_bits("mode", enc.bits() - b0);
        if (residual.empty()) continue;
        node.point_indices = std::move(residual);
      }
    }

    auto children = partition(node, rel);
    double b0 = enc.bits();
    encode_occupancy(enc, ctx.occ, occupancy_of(children));
    add_bits("occupancy", enc.bits() - b0);
    for (int k = 0; k < 8; ++k) {
      if (children[size_t(k)].empty()) continue;
      OctreeNode child;
      child.origin = child_origin(node, k);
      child.log2_size = node.log2_size - 1;
      child.depth = node.depth + 1;
      child.point_indices = std::move(children[size_t(k)]);
      queue.push_back(std::move(child));
    }
  }
  enc.flush();
  return {std::move(out), std::move(stats)};
}

}  // namespace

RdScore score_linear(const std::vector<Vec3R>& local_points, const Line& line,
                     const QuantizedLine& qline, const QuantConfig& quant,
                     double peak, const LineContexts& ctxs, bool offsets,
                     bool has_prev, int32_t prev_theta_idx) {
  LineContexts tmp = ctxs;
  std::vector<uint8_t> sink;
  RangeEncoder probe(sink);
  LineBits lb = encode_line_payload(probe, tmp, qline, quant.q_a, offsets, has_prev,
                                    prev_theta_idx);

  auto recon = reconstruct_voxels(qline, quant);
  std::vector<Point3> orig;
  orig.reserve(line.member_indices.size());
  for (uint32_t li : line.member_indices)
    orig.push_back(round_point(local_points[li]));

  // Symmetric nearest-neighbor point-to-point MSE, brute force over members.
  auto directional = [](const std::vector<Point3>& from, const std::vector<Point3>& to) {
    double sum = 0;
    for (const auto& f : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : to) {
        Vec3R d = to_vec(f) - to_vec(t);
        best = std::min(best, d.norm2());
      }
      sum += best;
    }
    return sum / double(from.size());
  };
  double mse = std::max(directional(orig, recon), directional(recon, orig));
  // Positions are integers: floor the error at the uniform half-voxel
  // rounding variance (3 * 1/12) so exact fits score finitely.
  mse = std::max(mse, 0.25);

  RdScore s;
  s.p_l = geometry_psnr(mse, peak);
  s.bits_total = lb.total();
  s.r_l = lb.total() / double(qline.n);
  return s;
}

std::pair<std::vector<uint8_t>, EncodeStats> encode(const PointCloud& cloud,
                                                    const EncoderConfig& cfg) {
  return encode_impl(cloud, cfg, cfg.linear_enabled);
}

std::pair<std::vector<uint8_t>, EncodeStats> encode_octree_only(
    const PointCloud& cloud, const EncoderConfig& cfg) {
  return encode_impl(cloud, cfg, false);
}

PointCloud decode(std::span<const uint8_t> stream) {
  auto [h, header_size] = StreamHeader::parse(stream);
  RangeDecoder dec(stream.data() + header_size, stream.size() - header_size);

  QuantConfig quant;
  quant.q_g = double(h.q_g);
  quant.q_a = h.q_a;
  quant.q_r = 0;

  const int leaf_l2 = leaf_log2_for(quant.q_g);
  const int top = root_log2(h.bbox, leaf_l2);
  const bool linear = h.linear_enabled();
  const bool lossless = h.lossless();

  CodecContexts ctx;
  struct DecNode {
    Point3 origin;
    int log2_size;
  };
  std::deque<DecNode> queue;
  queue.push_back({{0, 0, 0}, top});

  std::vector<Point3> points;
  points.reserve(h.point_count);

  // In a valid stream every coded node is non-empty, so each level holds at
  // most point_count nodes.
  const uint64_t node_budget = uint64_t(h.point_count) * uint64_t(top + 1) + 64;
  uint64_t nodes_seen = 0;

  while (!queue.empty()) {
    DecNode node = queue.front();
    queue.pop_front();
    if (++nodes_seen > node_budget) throw DecodeError("node budget exceeded");

    OctreeNode onode;
    onode.origin = node.origin;
    onode.log2_size = node.log2_size;

    // A valid stream never decodes more points than it was encoded from.
    if (points.size() > h.point_count)
      throw DecodeError("decoded point budget exceeded");

    if (node.log2_size == leaf_l2) {
      if (lossless) {
        for (const auto& p : decode_leaf_lossless(dec, ctx.leaf, onode))
          points.push_back(p);
      } else {
        points.push_back(leaf_center(onode));
      }
      continue;
    }

    if (linear && dec.decode_bit(ctx.line.mode)) {
      uint32_t count = decode_line_count(dec, ctx.line);
      bool has_prev = false;
      int32_t prev_theta = 0;
      for (uint32_t li = 0; li < count; ++li) {
        QuantizedLine q = decode_line_payload(dec, ctx.line, quant.q_a, lossless,
                                              has_prev, prev_theta);
        if (points.size() + q.n > h.point_count)
          throw DecodeError("decoded point budget exceeded");
        prev_theta = q.theta_idx;
        has_prev = true;
        for (const auto& p : reconstruct_voxels(q, quant))
          points.push_back(node.origin + p);
      }
      if (!dec.decode_bit(ctx.line.residual)) continue;
    }

    OccupancyCode code = decode_occupancy(dec, ctx.occ);
    for (int k = 0; k < 8; ++k)
      if ((code.bits >> k) & 1)
        queue.push_back({child_origin(onode, k), node.log2_size - 1});
  }

  if (dec.consumed() != dec.stream_size())
    throw DecodeError("trailing bytes after payload: " +
                      std::to_string(dec.stream_size() - dec.consumed()));
  if (lossless && points.size() != h.point_count)
    throw DecodeError("lossless point count mismatch");

  for (auto& p : points) p = p + h.bbox.min;
  PointCloud cloud;
  cloud.points = std::move(points);
  cloud.recompute_bbox();
  return cloud;
}

std::string EncodeStats::to_json() const {
  nlohmann::json j;
  j["nodes_total"] = nodes_total;
  j["nodes_linear"] = nodes_linear;
  j["lines_coded"] = lines_coded;
  j["points_by_linear"] = points_by_linear;
  j["points_by_octree"] = points_by_octree;
  j["bits_by_category"] = bits_by_category;
  return j.dump(2);
}

}  // namespace lpcc
