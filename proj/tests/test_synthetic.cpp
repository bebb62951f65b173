#include <filesystem>

#include "doctest.h"
#include "lpcc/synthetic.hpp"

using namespace lpcc;

namespace {

double dist_to_line(const Point3& p, const GroundTruthLine& l) {
  Vec3R d = to_vec(p) - l.a;
  Vec3R perp = d - l.b * d.dot(l.b);
  return perp.norm();
}

}  // namespace

TEST_CASE("same seed yields the same cloud and ground truth") {
  SyntheticConfig cfg;
  cfg.seed = 123;
  cfg.lines = 15;
  cfg.noise_sigma = 0.7;
  cfg.uniform_fraction = 0.2;
  SyntheticCloud a = gen_synthetic(cfg);
  SyntheticCloud b = gen_synthetic(cfg);
  CHECK(a.cloud.points == b.cloud.points);
  REQUIRE(a.lines.size() == b.lines.size());
  for (size_t i = 0; i < a.lines.size(); ++i) {
    CHECK(a.lines[i].a == b.lines[i].a);
    CHECK(a.lines[i].b == b.lines[i].b);
    CHECK(a.lines[i].n == b.lines[i].n);
    CHECK(a.lines[i].spacing == b.lines[i].spacing);
  }
  cfg.seed = 124;
  CHECK(gen_synthetic(cfg).cloud.points != a.cloud.points);
}

TEST_CASE("noise-free points lie on the ground-truth lines up to rounding") {
  SyntheticConfig cfg;
  cfg.seed = 9;
  cfg.lines = 12;
  cfg.noise_sigma = 0.0;
  SyntheticCloud s = gen_synthetic(cfg);
  REQUIRE(s.lines.size() == cfg.lines);
  const double bound = std::sqrt(3.0) / 2 + 1e-9;  // voxel rounding only
  for (const auto& p : s.cloud.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : s.lines) best = std::min(best, dist_to_line(p, l));
    CHECK(best <= bound);
  }
}

TEST_CASE("ground-truth directions are unit and canonical") {
  SyntheticConfig cfg;
  cfg.seed = 31;
  cfg.lines = 50;
  SyntheticCloud s = gen_synthetic(cfg);
  for (const auto& l : s.lines) {
    CHECK(l.b.norm() == doctest::Approx(1.0));
    CHECK(l.b == canonicalize_direction(l.b));
    CHECK(l.n >= cfg.min_points_per_line);
    CHECK(l.n <= cfg.max_points_per_line);
    CHECK(l.spacing >= cfg.spacing_min);
    CHECK(l.spacing <= cfg.spacing_max);
  }
}

TEST_CASE("degenerate config produces a two-point cloud") {
  SyntheticConfig cfg;
  cfg.seed = 4;
  cfg.lines = 1;
  cfg.min_points_per_line = cfg.max_points_per_line = 2;
  cfg.noise_sigma = 0.0;
  SyntheticCloud s = gen_synthetic(cfg);
  CHECK(s.cloud.size() == 2);
  CHECK(s.lines.size() == 1);
  CHECK(s.lines[0].n == 2);
}

TEST_CASE("uniform clutter adds roughly the requested fraction") {
  SyntheticConfig base;
  base.seed = 17;
  base.lines = 30;
  base.noise_sigma = 0.0;
  size_t structured = gen_synthetic(base).cloud.size();
  SyntheticConfig with = base;
  with.uniform_fraction = 0.5;
  size_t mixed = gen_synthetic(with).cloud.size();
  // Deduplication can swallow a few collisions, hence the slack.
  CHECK(double(mixed) >= double(structured) * 1.3);
  CHECK(double(mixed) <= double(structured) * 1.6);
}

TEST_CASE("ground-truth sidecar round-trips") {
  SyntheticConfig cfg;
  cfg.seed = 8;
  cfg.lines = 9;
  SyntheticCloud s = gen_synthetic(cfg);
  auto path =
      (std::filesystem::temp_directory_path() / "lpcc_gt_test.lines.txt").string();
  write_ground_truth(s.lines, path);
  auto r = read_ground_truth(path);
  std::filesystem::remove(path);
  REQUIRE(r.size() == s.lines.size());
  for (size_t i = 0; i < r.size(); ++i) {
    CHECK(r[i].a == s.lines[i].a);
    CHECK(r[i].b == s.lines[i].b);
    CHECK(r[i].n == s.lines[i].n);
    CHECK(r[i].spacing == s.lines[i].spacing);
  }
}
