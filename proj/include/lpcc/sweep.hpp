#pragma once

#include <string>
#include <vector>

#include "lpcc/codec.hpp"
#include "lpcc/rdo.hpp"

namespace lpcc {

struct SweepPoint {
  double lambda = 0;
  double qg_opt = 1;
  double t_opt = 0;
  double score = 0;  // mean over clouds of D1 PSNR - lambda * bpp
};

struct SweepResult {
  std::vector<SweepPoint> points;
  LambdaModel model;
};

struct SweepConfig {
  std::vector<double> lambdas = {0, 5, 10, 15, 20, 25, 30};
  std::vector<double> qg_grid = {1, 2, 4, 8, 16, 32};
  uint32_t t_grid_size = 21;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Score every (Q_g, T) grid cell per lambda by the mean of
/// D1 PSNR - lambda * bits-per-point over the clouds, pick the best monotone
/// path across lambdas (Q_g non-decreasing, T non-increasing), then fit
/// Q_g(lambda) = alpha e^{beta lambda} and T(lambda) = gamma e^{-delta lambda}.
/// The T grid spans the candidate scores observed in a calibration pass that
/// accepts every detected line.
SweepResult sweep_and_fit(const std::vector<PointCloud>& clouds,
                          const SweepConfig& sweep, const EncoderConfig& base);

/// CSV rows: lambda,qg_opt,t_opt,score
std::string sweep_csv(const SweepResult& r);

}  // namespace lpcc
