#include <filesystem>
#include <random>

#include "doctest.h"
#include "lpcc/linemodel.hpp"
#include "lpcc/rdo.hpp"

using namespace lpcc;

namespace {

// Exhaustive oracle over all windows, same tie-break: longest, then smallest
// distortion, then smallest start.
SubsetChoice brute_subset(const std::vector<double>& d, double d_c_bar) {
  SubsetChoice best{1, 2, window_distortion(d, 0, 1), false};
  for (size_t len = 1; len <= d.size(); ++len) {
    for (size_t start = 0; start + len <= d.size(); ++start) {
      double dist = window_distortion(d, start, len);
      if (dist >= d_c_bar) continue;
      bool better = !best.feasible || len > size_t(best.j - best.i) ||
                    (len == size_t(best.j - best.i) && dist < best.distortion);
      if (better) best = {uint32_t(start + 1), uint32_t(start + len + 1), dist, true};
    }
  }
  return best;
}

}  // namespace

TEST_CASE("fast_subset keeps a perfectly even window whole") {
  SubsetChoice s = fast_subset({1, 1, 1, 1}, 0.5);
  CHECK(s.feasible);
  CHECK(s.i == 1);
  CHECK(s.j == 5);
  CHECK(s.distortion == 0.0);
}

TEST_CASE("fast_subset hand case d=(1,3,2)") {
  // Full window: mean 2, e=(-1,1,0), cumulative=(-1,0,0), distortion 1/3.
  SubsetChoice wide = fast_subset({1, 3, 2}, 0.34);
  CHECK(wide.i == 1);
  CHECK(wide.j == 4);
  CHECK(wide.distortion == doctest::Approx(1.0 / 3.0));
  SubsetChoice tight = fast_subset({1, 3, 2}, 0.33);
  CHECK(tight.j - tight.i < 3);
}

TEST_CASE("fast_subset flags infeasibility") {
  SubsetChoice s = fast_subset({1, 2, 3}, 0.0);
  CHECK_FALSE(s.feasible);
  CHECK(s.i == 1);
  CHECK(s.j == 2);
  CHECK_THROWS_AS(fast_subset({}, 1.0), Error);
}

TEST_CASE("fast_subset matches the exhaustive oracle") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> ud(0.0, 4.0);
  std::uniform_real_distribution<double> uc(0.01, 2.0);
  std::uniform_int_distribution<size_t> un(1, 19);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> d(un(rng));
    for (auto& v : d) v = ud(rng);
    double c = uc(rng);
    SubsetChoice got = fast_subset(d, c);
    SubsetChoice want = brute_subset(d, c);
    CHECK(got.i == want.i);
    CHECK(got.j == want.j);
    CHECK(got.feasible == want.feasible);
    CHECK(got.distortion == doctest::Approx(want.distortion));
  }
}

TEST_CASE("decide_mode uses a strict threshold") {
  CHECK(decide_mode(10, 5) == Mode::LinearModel);
  CHECK(decide_mode(5, 5) == Mode::Octree);
  CHECK(decide_mode(-100, -std::numeric_limits<double>::infinity()) ==
        Mode::LinearModel);
}

TEST_CASE("rds recomputable from fields") {
  RdScore s;
  s.p_l = 42.0;
  s.r_l = 3.0;
  CHECK(s.rds_at(0.0) == 42.0);  // lambda 0 degenerates to PSNR
  CHECK(s.rds_at(10.0) == doctest::Approx(12.0));
  CHECK(s.rds_at(20.0) < s.rds_at(10.0));  // strictly decreasing in lambda * rate
}

TEST_CASE("fit_exponential recovers exact synthetic coefficients") {
  std::vector<double> x = {0, 5, 10, 15, 20, 25, 30};
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 * std::exp(0.1 * v));
  std::vector<double> res;
  auto [alpha, beta] = fit_exponential(x, y, &res);
  CHECK(alpha == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(beta == doctest::Approx(0.1).epsilon(1e-6));
  for (double r : res) CHECK(std::abs(r) < 1e-9);
  CHECK_THROWS_AS(fit_exponential({0, 1}, {1.0, -2.0}), Error);
  CHECK_THROWS_AS(fit_exponential({0}, {1.0}), Error);
}

TEST_CASE("lambda model save/load round-trip") {
  LambdaModel m;
  m.qg_alpha = 1.5;
  m.qg_beta = 0.07;
  m.t_gamma = 25.0;
  m.t_delta = 0.04;
  m.fit_residuals = {0.01, -0.02, 0.0};
  auto path = (std::filesystem::temp_directory_path() / "lpcc_model_test.txt").string();
  save_lambda_model(m, path);
  LambdaModel r = load_lambda_model(path);
  std::filesystem::remove(path);
  CHECK(r.qg_alpha == m.qg_alpha);
  CHECK(r.qg_beta == m.qg_beta);
  CHECK(r.t_gamma == m.t_gamma);
  CHECK(r.t_delta == m.t_delta);
  CHECK(r.fit_residuals == m.fit_residuals);
  CHECK(r.qg_of(10.0) == doctest::Approx(1.5 * std::exp(0.7)));
  CHECK(r.t_of(10.0) == doctest::Approx(25.0 * std::exp(-0.4)));
}
