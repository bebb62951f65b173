#include "lpcc/rdo.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lpcc/linemodel.hpp"

namespace lpcc {

SubsetChoice fast_subset(const std::vector<double>& d, double d_c_bar) {
  if (d.empty()) throw Error("fast_subset: need at least one difference");
  const size_t m = d.size();  // N - 1 differences

  // Longest window first; the first feasible length wins. Ties within one
  // length go to the smaller distortion, then the smaller start.
  for (size_t len = m; len >= 1; --len) {
    SubsetChoice best;
    bool found = false;
    for (size_t start = 0; start + len <= m; ++start) {
      double dist = window_distortion(d, start, len);
      if (dist < d_c_bar && (!found || dist < best.distortion)) {
        best = {uint32_t(start + 1), uint32_t(start + len + 1), dist, true};
        found = true;
      }
    }
    if (found) return best;
  }
  // No feasible window at all (d_c_bar <= 0): report the first pair.
  return {1, 2, window_distortion(d, 0, 1), false};
}

std::pair<double, double> fit_exponential(const std::vector<double>& x,
                                          const std::vector<double>& y,
                                          std::vector<double>* residuals) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("fit_exponential: need >= 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0)) throw Error("fit_exponential: y must be positive");
    double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  double denom = n * sxx - sx * sx;
  double beta = denom == 0 ? 0.0 : (n * sxy - sx * sy) / denom;
  double lna = (sy - beta * sx) / n;
  double alpha = std::exp(lna);
  if (residuals) {
    residuals->clear();
    for (size_t i = 0; i < x.size(); ++i)
      residuals->push_back(std::log(y[i]) - (lna + beta * x[i]));
  }
  return {alpha, beta};
}

void save_lambda_model(const LambdaModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "qg_alpha " << m.qg_alpha << "\n"
      << "qg_beta " << m.qg_beta << "\n"
      << "t_gamma " << m.t_gamma << "\n"
      << "t_delta " << m.t_delta << "\n";
  out << "residuals";
  for (double r : m.fit_residuals) out << " " << r;
  out << "\n";
}

LambdaModel load_lambda_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  LambdaModel m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "qg_alpha") ss >> m.qg_alpha;
    else if (key == "qg_beta") ss >> m.qg_beta;
    else if (key == "t_gamma") ss >> m.t_gamma;
    else if (key == "t_delta") ss >> m.t_delta;
    else if (key == "residuals") {
      double r;
      while (ss >> r) m.fit_residuals.push_back(r);
    } else if (!key.empty()) {
      throw ParseError(path + ": unknown key '" + key + "'");
    }
  }
  return m;
}

}  // namespace lpcc
