#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpcc/geometry.hpp"

namespace lpcc {

struct RdoConfig {
  double lambda = 1.0;
  double d_c_bar = 0.5;  // max tolerant average distortion, voxels
  double threshold = 30.0;  // RDS threshold T
};

/// Rate-distortion score of one candidate: geometry PSNR minus lambda times
/// the rate. bits_total is the exact probe-coded payload; the rate entering
/// the score is bits per member point so PSNR and rate live on one scale.
struct RdScore {
  double p_l = 0;        // geometry PSNR, dB
  double r_l = 0;        // coded bits per member point
  double bits_total = 0; // coded bits for the whole candidate payload
  double rds() const { return p_l; }
  double rds_at(double lambda) const { return p_l - lambda * r_l; }
};

struct LambdaModel {
  double qg_alpha = 1, qg_beta = 0;   // Q_g(lambda) = alpha * exp(beta * lambda)
  double t_gamma = 1, t_delta = 0;    // T(lambda)   = gamma * exp(-delta * lambda)
  std::vector<double> fit_residuals;

  double qg_of(double lambda) const { return qg_alpha * std::exp(qg_beta * lambda); }
  double t_of(double lambda) const { return t_gamma * std::exp(-t_delta * lambda); }
};

struct SubsetChoice {
  // 1-based point indices i < j; the window covers differences d_i .. d_{j-1}.
  uint32_t i = 1, j = 2;
  double distortion = 0;
  bool feasible = true;
};

/// Longest window of the difference sequence whose average distortion stays
/// below d_c_bar. Exact: scans lengths from longest down, ties broken by
/// smaller distortion then smaller start.
SubsetChoice fast_subset(const std::vector<double>& d, double d_c_bar);

enum class Mode { LinearModel, Octree };

/// Linear model iff the score strictly exceeds the threshold.
inline Mode decide_mode(double rds, double threshold) {
  return rds > threshold ? Mode::LinearModel : Mode::Octree;
}

/// Least-squares fit of y = alpha * exp(beta * x) via log-linear regression.
/// All y must be positive. Returns (alpha, beta) and fills residuals
/// (log-domain) when requested.
std::pair<double, double> fit_exponential(const std::vector<double>& x,
                                          const std::vector<double>& y,
                                          std::vector<double>* residuals = nullptr);

void save_lambda_model(const LambdaModel& m, const std::string& path);
LambdaModel load_lambda_model(const std::string& path);

}  // namespace lpcc
