#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpcc/geometry.hpp"
#include "lpcc/linemodel.hpp"

namespace lpcc {

struct SyntheticConfig {
  uint64_t seed = 1;
  uint32_t lines = 100;
  uint32_t min_points_per_line = 20;
  uint32_t max_points_per_line = 120;
  double extent = 1024;       // cube edge, voxels
  double noise_sigma = 0.5;   // perpendicular Gaussian noise, voxels
  double spacing_min = 1.0;   // along-line point spacing range, voxels
  double spacing_max = 4.0;
  double uniform_fraction = 0.0;  // extra unstructured points, as a fraction
                                  // of the structured count
};

struct GroundTruthLine {
  Vec3R a;
  Vec3R b;  // unit, canonical
  uint32_t n = 0;
  double spacing = 0;
};

struct SyntheticCloud {
  PointCloud cloud;
  std::vector<GroundTruthLine> lines;
};

/// Deterministic synthetic Lidar-like cloud: `lines` straight segments with
/// evenly spaced points plus perpendicular Gaussian noise, optionally mixed
/// with uniform clutter. Same seed, same cloud.
SyntheticCloud gen_synthetic(const SyntheticConfig& cfg);

/// Text sidecar with the ground-truth segments, one per row:
/// ax ay az bx by bz n spacing
void write_ground_truth(const std::vector<GroundTruthLine>& lines,
                        const std::string& path);
std::vector<GroundTruthLine> read_ground_truth(const std::string& path);

}  // namespace lpcc
