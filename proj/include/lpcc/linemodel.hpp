#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lpcc/geometry.hpp"
#include "lpcc/mathutil.hpp"

namespace lpcc {

struct DegenerateLine : Error {
  using Error::Error;
};

/// A detected line: anchor a (the projection of the first member, so p_1 = 0),
/// unit direction b, and the ordered member point indices.
struct Line {
  Vec3R a;
  Vec3R b;
  std::vector<uint32_t> member_indices;
  uint32_t count() const { return uint32_t(member_indices.size()); }
};

enum class ProjectionMode { Arbitrary, Even, PiecewiseEven };

struct Segment {
  uint32_t start_index = 0;  // index into d
  double mean = 0;
};

struct ProjectionParams {
  ProjectionMode mode = ProjectionMode::Even;
  std::vector<double> p;  // non-decreasing, p[0] == 0
  std::vector<double> d;  // d[i] = p[i+1] - p[i], >= 0
  double d_bar = 0;       // mean of the N-1 differences
  std::vector<Segment> segments;
};

struct OffsetParams {
  std::vector<Vec3R> r;  // r_i = x_i - x'_i, exact
};

struct DetectorConfig {
  uint32_t min_points = 8;
  uint32_t max_points = 4096;
  uint32_t depth_threshold = 4;
  double inlier_distance = 2.0;  // voxels; >= 1
  uint32_t hough_granularity = 4;  // icosahedron subdivision order
  uint32_t hough_shift_bins = 16;
  uint32_t max_lines_per_node = 8;
  uint32_t max_iterations = 10;
};

struct LineCandidate {
  Vec3R a;
  Vec3R b;
  std::vector<uint32_t> inliers;  // indices into the detect() input
};

/// Density/depth gate for the linear path: enough points, and either not too
/// many or deep enough in the tree.
bool eligible(size_t point_count, uint32_t depth, const DetectorConfig& cfg);

/// Orthogonal least-squares fit: a = centroid, b = dominant eigenvector of the
/// scatter matrix, sign-canonicalized. Throws DegenerateLine when all points
/// coincide.
std::pair<Vec3R, Vec3R> fit_line_pca(const std::vector<Vec3R>& points);

/// Iterative Hough transform: vote in discretized (direction, shift) space,
/// take the best cell, refine with PCA, remove inliers, repeat. Candidates
/// come back sorted by descending inlier count.
std::vector<LineCandidate> hough_detect(const std::vector<Vec3R>& points,
                                        const DetectorConfig& cfg);

/// Project members onto the line, order by projection position, re-anchor at
/// the first projected point so p_1 = 0.
std::pair<Line, ProjectionParams> project_and_order(const std::vector<Vec3R>& points,
                                                    std::vector<uint32_t> members,
                                                    const Vec3R& a, const Vec3R& b);

/// Exact residuals from projected to original positions.
OffsetParams make_offsets(const std::vector<Vec3R>& points, const Line& line,
                          const ProjectionParams& proj);

/// Average along-line distortion of one window of differences (the l1 norm of
/// the running sums of deviations from the window mean, divided by the window
/// length).
double window_distortion(const std::vector<double>& d, size_t first, size_t count);

/// Greedy left-to-right split of the difference sequence into segments whose
/// average distortion stays below tolerance.
std::vector<Segment> segment_piecewise(const std::vector<double>& d, double tolerance);

/// Directions of the geodesic icosahedron subdivision of the given order,
/// restricted to one hemisphere (line directions are symmetric).
const std::vector<Vec3R>& hough_directions(uint32_t granularity);

}  // namespace lpcc
