#include "lpcc/quantizer.hpp"

namespace lpcc {

std::pair<double, double> to_spherical(const Vec3R& b_in) {
  Vec3R b = canonicalize_direction(b_in);
  double hyp = std::hypot(b.x, b.y);
  double phi = std::atan2(b.z, hyp);
  double theta = hyp < 1e-15 ? 0.0 : std::atan2(b.y, b.x);  // theta = 0 at the pole
  return {theta, phi};
}

std::pair<int32_t, int32_t> quantize_angles(double theta, double phi, uint32_t q_a) {
  QuantConfig cfg;
  cfg.q_a = q_a;
  int32_t phi_idx = round_away(phi / cfg.phi_step());
  int32_t theta_idx = round_away(theta / cfg.theta_step());
  phi_idx = std::clamp<int32_t>(phi_idx, 0, int32_t(q_a));
  theta_idx = std::clamp<int32_t>(theta_idx, -2 * int32_t(q_a), 2 * int32_t(q_a));
  // Symmetry restriction: with phi quantized to the equator, theta must land
  // in [0, pi]; wrapping by pi selects the negated (equivalent) direction.
  if (phi_idx == 0 && theta_idx < 0) theta_idx += 2 * int32_t(q_a);
  if (phi_idx == int32_t(q_a)) theta_idx = 0;  // pole convention
  return {theta_idx, phi_idx};
}

std::pair<double, double> dequantize_angles(int32_t theta_idx, int32_t phi_idx,
                                            uint32_t q_a) {
  QuantConfig cfg;
  cfg.q_a = q_a;
  return {double(theta_idx) * cfg.theta_step(), double(phi_idx) * cfg.phi_step()};
}

Vec3R direction_from_angles(double theta, double phi) {
  double c = std::cos(phi);
  return {c * std::cos(theta), c * std::sin(theta), std::sin(phi)};
}

QuantizedLine quantize_line(Line& line, ProjectionParams& proj, const QuantConfig& cfg,
                            const std::vector<Vec3R>* points) {
  if (proj.d_bar < 0) throw Error("quantize_line: negative mean spacing");

  QuantizedLine q;
  q.n = line.count();

  auto [theta, phi] = to_spherical(line.b);
  std::tie(q.theta_idx, q.phi_idx) = quantize_angles(theta, phi, cfg.q_a);
  auto [th, ph] = dequantize_angles(q.theta_idx, q.phi_idx, cfg.q_a);
  Vec3R b_hat = direction_from_angles(th, ph);

  if (b_hat.dot(line.b) < 0) {
    // Equator wrap flipped the coded direction; mirror the member order so
    // reconstruction still walks from the anchor through the members.
    double p_last = proj.p.empty() ? 0.0 : proj.p.back();
    line.a = line.a + line.b * p_last;
    line.b = -line.b;
    std::reverse(line.member_indices.begin(), line.member_indices.end());
    std::vector<double> np(proj.p.size());
    for (size_t i = 0; i < proj.p.size(); ++i)
      np[i] = p_last - proj.p[proj.p.size() - 1 - i];
    proj.p = std::move(np);
    std::reverse(proj.d.begin(), proj.d.end());
  }

  for (int ax = 0; ax < 3; ++ax)
    q.a_idx[ax] = round_away(line.a[ax] / cfg.q_s());
  q.d_idx = q.n > 1 ? int64_t(round_away(proj.d_bar / cfg.q_d(q.n))) : 0;

  if (points) {
    DequantizedLine dq = dequantize_line(q, cfg);
    std::vector<std::array<int32_t, 3>> offs;
    offs.reserve(q.n);
    for (uint32_t i = 0; i < q.n; ++i) {
      Vec3R base = dq.a + dq.b * (double(i) * dq.d);
      Vec3R x = (*points)[line.member_indices[i]];
      if (cfg.q_r <= 0) {
        Point3 xi = round_point(x);
        Point3 bi = round_point(base);
        offs.push_back({xi.x - bi.x, xi.y - bi.y, xi.z - bi.z});
      } else {
        Vec3R r = x - base;
        offs.push_back({round_away(r.x / cfg.q_r), round_away(r.y / cfg.q_r),
                        round_away(r.z / cfg.q_r)});
      }
    }
    q.offset_indices = std::move(offs);
  }
  return q;
}

DequantizedLine dequantize_line(const QuantizedLine& q, const QuantConfig& cfg) {
  DequantizedLine dq;
  auto [th, ph] = dequantize_angles(q.theta_idx, q.phi_idx, cfg.q_a);
  dq.b = direction_from_angles(th, ph);
  dq.a = {double(q.a_idx[0]) * cfg.q_s(), double(q.a_idx[1]) * cfg.q_s(),
          double(q.a_idx[2]) * cfg.q_s()};
  dq.d = double(q.d_idx) * cfg.q_d(q.n);
  dq.n = q.n;
  return dq;
}

std::vector<Vec3R> reconstruct(const QuantizedLine& q, const QuantConfig& cfg) {
  DequantizedLine dq = dequantize_line(q, cfg);
  std::vector<Vec3R> out;
  out.reserve(q.n);
  for (uint32_t i = 0; i < q.n; ++i) {
    Vec3R base = dq.a + dq.b * (double(i) * dq.d);
    if (q.offset_indices) {
      const auto& o = (*q.offset_indices)[i];
      if (cfg.q_r <= 0) {
        Point3 bi = round_point(base);
        out.push_back({double(bi.x + o[0]), double(bi.y + o[1]), double(bi.z + o[2])});
      } else {
        out.push_back(base + Vec3R{double(o[0]) * cfg.q_r, double(o[1]) * cfg.q_r,
                                   double(o[2]) * cfg.q_r});
      }
    } else {
      out.push_back(base);
    }
  }
  return out;
}

std::vector<Point3> reconstruct_voxels(const QuantizedLine& q, const QuantConfig& cfg) {
  std::vector<Point3> out;
  auto pts = reconstruct(q, cfg);
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(round_point(p));
  return out;
}

}  // namespace lpcc
