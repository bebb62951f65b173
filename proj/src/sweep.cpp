#include "lpcc/sweep.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "lpcc/metrics.hpp"

namespace lpcc {

namespace {

template <class Fn>
void parallel_for(size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
  if (threads == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::scoped_lock lk(err_mutex);
        if (err) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lk(err_mutex);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double cloud_score(const PointCloud& cloud, const EncoderConfig& cfg, double lambda) {
  auto [stream, stats] = encode(cloud, cfg);
  PointCloud dec = decode(stream);
  // Floor the error at the voxel-rounding variance (3 * 1/12): positions are
  // integers, so fidelity beyond that is not meaningful and an exact
  // reconstruction must not produce an unbounded score.
  double mse = std::max(d1_symmetric(cloud, dec), 0.25);
  double peak = std::max<double>(1.0, double(cloud.bbox.longest_edge()));
  double psnr = geometry_psnr(mse, peak);
  double bpp = double(stream.size()) * 8.0 / double(cloud.size());
  return psnr - lambda * bpp;
}

}  // namespace

SweepResult sweep_and_fit(const std::vector<PointCloud>& clouds,
                          const SweepConfig& sweep, const EncoderConfig& base) {
  if (clouds.empty()) throw Error("sweep: no clouds");
  if (sweep.lambdas.empty() || sweep.qg_grid.empty() || sweep.t_grid_size < 2)
    throw Error("sweep: empty grid");
  unsigned threads = sweep.threads ? sweep.threads
                                   : std::max(1u, std::thread::hardware_concurrency());

  // Calibration: accept every detected line so the candidate scores span the
  // whole decision range, independent of any threshold choice.
  const size_t nq = sweep.qg_grid.size();
  std::vector<std::vector<std::pair<double, double>>> cal(nq * clouds.size());
  parallel_for(cal.size(), threads, [&](size_t ti) {
    EncoderConfig c = base;
    c.quant.q_g = sweep.qg_grid[ti / clouds.size()];
    c.rdo.threshold = -1e30;
    auto [stream, stats] = encode(clouds[ti % clouds.size()], c);
    auto& slot = cal[ti];
    slot.reserve(stats.candidate_psnr.size());
    for (size_t k = 0; k < stats.candidate_psnr.size(); ++k)
      slot.emplace_back(stats.candidate_psnr[k], stats.candidate_rate[k]);
  });
  std::vector<std::pair<double, double>> candidates;  // (P_l, R_l)
  for (auto& slot : cal)
    candidates.insert(candidates.end(), slot.begin(), slot.end());

  struct Cell {
    double qg, t, score;
  };
  std::vector<std::vector<Cell>> layers;  // one layer of scored cells per lambda
  for (double lambda : sweep.lambdas) {
    // Threshold grid over the positive part of the observed score range; the
    // threshold family T(lambda) is positive by construction.
    double lo = 1e-3, hi = 1.0;
    if (!candidates.empty()) {
      double mn = std::numeric_limits<double>::infinity(), mx = -mn;
      for (const auto& [p, r] : candidates) {
        double rds = p - lambda * r;
        mn = std::min(mn, rds);
        mx = std::max(mx, rds);
      }
      lo = std::max(1e-3, mn - 1e-9);
      hi = std::max(lo + 1e-3, mx);
    }
    std::vector<double> t_grid(sweep.t_grid_size);
    for (uint32_t k = 0; k < sweep.t_grid_size; ++k)
      t_grid[k] = lo + (hi - lo) * double(k) / double(sweep.t_grid_size - 1);

    std::vector<Cell> cells;
    for (double qg : sweep.qg_grid)
      for (auto it = t_grid.rbegin(); it != t_grid.rend(); ++it)
        cells.push_back({qg, *it, 0});

    std::vector<double> scores(cells.size() * clouds.size());
    parallel_for(scores.size(), threads, [&](size_t ti) {
      const Cell& cell = cells[ti / clouds.size()];
      EncoderConfig c = base;
      c.quant.q_g = cell.qg;
      c.rdo.lambda = lambda;
      c.rdo.threshold = cell.t;
      scores[ti] = cloud_score(clouds[ti % clouds.size()], c, lambda);
    });
    for (size_t ci = 0; ci < cells.size(); ++ci) {
      double s = 0;
      for (size_t k = 0; k < clouds.size(); ++k) s += scores[ci * clouds.size() + k];
      cells[ci].score = s / double(clouds.size());
    }
    layers.push_back(std::move(cells));
  }

  // The score surface is near-flat in T at coarse steps, so independent
  // per-lambda argmaxes jitter. The optima are the best jointly monotone path
  // (Q_g non-decreasing, T non-increasing) through the layers, which is what
  // the exponential families assume; within a layer the cells run over
  // ascending Q_g and descending T, so ties keep the smaller step and larger
  // threshold.
  SweepResult out;
  {
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> total(layers.size());
    std::vector<std::vector<int32_t>> from(layers.size());
    for (size_t li = 0; li < layers.size(); ++li) {
      total[li].assign(layers[li].size(), -kInf);
      from[li].assign(layers[li].size(), -1);
      for (size_t c = 0; c < layers[li].size(); ++c) {
        if (li == 0) {
          total[li][c] = layers[li][c].score;
          continue;
        }
        for (size_t p = 0; p < layers[li - 1].size(); ++p) {
          if (total[li - 1][p] == -kInf) continue;
          if (layers[li][c].qg < layers[li - 1][p].qg) continue;
          if (layers[li][c].t > layers[li - 1][p].t + 1e-12) continue;
          double cand = total[li - 1][p] + layers[li][c].score;
          if (cand > total[li][c]) {
            total[li][c] = cand;
            from[li][c] = int32_t(p);
          }
        }
      }
    }
    size_t tail = layers.size() - 1;
    int32_t best = -1;
    for (size_t c = 0; c < layers[tail].size(); ++c)
      if (total[tail][c] != -kInf && (best < 0 || total[tail][c] > total[tail][size_t(best)]))
        best = int32_t(c);
    if (best < 0) throw Error("sweep: no monotone path through the score grid");
    std::vector<int32_t> path(layers.size());
    for (size_t li = layers.size(); li-- > 0;) {
      path[li] = best;
      best = from[li][size_t(best)];
    }
    for (size_t li = 0; li < layers.size(); ++li) {
      const Cell& c = layers[li][size_t(path[li])];
      out.points.push_back({sweep.lambdas[li], c.qg, c.t, c.score});
    }
  }

  std::vector<double> xs, qg_ys, t_ys;
  for (const auto& p : out.points) {
    xs.push_back(p.lambda);
    qg_ys.push_back(p.qg_opt);
    t_ys.push_back(p.t_opt);
  }
  std::vector<double> res_qg, res_t;
  std::tie(out.model.qg_alpha, out.model.qg_beta) = fit_exponential(xs, qg_ys, &res_qg);
  auto [gamma, minus_delta] = fit_exponential(xs, t_ys, &res_t);
  out.model.t_gamma = gamma;
  out.model.t_delta = -minus_delta;
  out.model.fit_residuals = res_qg;
  out.model.fit_residuals.insert(out.model.fit_residuals.end(), res_t.begin(),
                                 res_t.end());
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream ss;
  ss.precision(10);
  ss << "lambda,qg_opt,t_opt,rds\n";
  for (const auto& p : r.points)
    ss << p.lambda << ',' << p.qg_opt << ',' << p.t_opt << ',' << p.score << '\n';
  return ss.str();
}

}  // namespace lpcc
