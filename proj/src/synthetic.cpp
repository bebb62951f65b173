#include "lpcc/synthetic.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "lpcc/mathutil.hpp"

namespace lpcc {

SyntheticCloud gen_synthetic(const SyntheticConfig& cfg) {
  if (cfg.lines == 0) throw Error("gen_synthetic: need at least one line");
  if (cfg.extent < 4) throw Error("gen_synthetic: extent too small");
  if (cfg.min_points_per_line < 2 || cfg.max_points_per_line < cfg.min_points_per_line)
    throw Error("gen_synthetic: bad points-per-line range");
  if (cfg.spacing_min <= 0 || cfg.spacing_max < cfg.spacing_min)
    throw Error("gen_synthetic: bad spacing range");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> upos(0.0, cfg.extent);
  std::uniform_real_distribution<double> uspace(cfg.spacing_min, cfg.spacing_max);
  std::uniform_int_distribution<uint32_t> un(cfg.min_points_per_line,
                                             cfg.max_points_per_line);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticCloud out;
  std::vector<Point3> pts;
  for (uint32_t li = 0; li < cfg.lines; ++li) {
    Vec3R dir;
    do {
      dir = {gauss(rng), gauss(rng), gauss(rng)};
    } while (dir.norm() < 1e-6);
    dir = canonicalize_direction(dir.normalized());
    Vec3R start{upos(rng), upos(rng), upos(rng)};
    uint32_t n = un(rng);
    double spacing = uspace(rng);
    auto [u, v] = orthonormal_basis(dir);
    for (uint32_t i = 0; i < n; ++i) {
      Vec3R p = start + dir * (double(i) * spacing);
      if (cfg.noise_sigma > 0)
        p = p + u * (gauss(rng) * cfg.noise_sigma) + v * (gauss(rng) * cfg.noise_sigma);
      pts.push_back(round_point(p));
    }
    out.lines.push_back({start, dir, n, spacing});
  }
  if (cfg.uniform_fraction > 0) {
    size_t extra = size_t(double(pts.size()) * cfg.uniform_fraction);
    for (size_t i = 0; i < extra; ++i)
      pts.push_back(round_point({upos(rng), upos(rng), upos(rng)}));
  }
  out.cloud = make_cloud(std::move(pts));
  return out;
}

void write_ground_truth(const std::vector<GroundTruthLine>& lines,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.precision(17);
  for (const auto& l : lines)
    f << l.a.x << ' ' << l.a.y << ' ' << l.a.z << ' ' << l.b.x << ' ' << l.b.y << ' '
      << l.b.z << ' ' << l.n << ' ' << l.spacing << '\n';
}

std::vector<GroundTruthLine> read_ground_truth(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::vector<GroundTruthLine> out;
  std::string row;
  size_t lineno = 0;
  while (std::getline(f, row)) {
    ++lineno;
    if (row.empty()) continue;
    std::istringstream ss(row);
    GroundTruthLine l;
    if (!(ss >> l.a.x >> l.a.y >> l.a.z >> l.b.x >> l.b.y >> l.b.z >> l.n >> l.spacing))
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad ground-truth row");
    out.push_back(l);
  }
  return out;
}

}  // namespace lpcc
