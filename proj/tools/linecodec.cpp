#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lpcc/codec.hpp"
#include "lpcc/io.hpp"
#include "lpcc/metrics.hpp"
#include "lpcc/sweep.hpp"
#include "lpcc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace lpcc;

namespace {

double print_psnr(double v) { return std::isfinite(v) ? v : 999.0; }

unsigned env_threads() {
  if (const char* s = std::getenv("LINECODEC_THREADS")) {
    long v = std::strtol(s, nullptr, 10);
    if (v > 0) return unsigned(v);
  }
  return 0;
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
}

RdCurve read_curve(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  RdCurve curve;
  std::string row;
  while (std::getline(f, row)) {
    if (row.empty()) continue;
    for (auto& c : row)
      if (c == ',') c = ' ';
    std::istringstream ss(row);
    double rate, psnr;
    if (ss >> rate >> psnr) curve.points.emplace_back(rate, psnr);
  }
  if (curve.points.empty()) throw Error(path + ": no rate/PSNR rows");
  return curve;
}

std::vector<PointCloud> read_cloud_dir(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".ply")
      paths.push_back(e.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw Error(dir + ": no .ply files");
  std::vector<PointCloud> clouds;
  for (const auto& p : paths) clouds.push_back(read_ply(p));
  return clouds;
}

struct SweepCsv {
  std::vector<double> lambdas, qg, t;
};

SweepCsv read_sweep_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  SweepCsv out;
  std::string row;
  size_t lineno = 0;
  while (std::getline(f, row)) {
    ++lineno;
    if (row.empty()) continue;
    for (auto& c : row)
      if (c == ',') c = ' ';
    std::istringstream ss(row);
    double l, q, t;
    if (ss >> l >> q >> t) {
      out.lambdas.push_back(l);
      out.qg.push_back(q);
      out.t.push_back(t);
    } else if (lineno > 1) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad sweep row");
    }
  }
  if (out.lambdas.empty()) throw Error(path + ": no sweep rows");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linecodec: octree + linear-model geometry codec for sparse point clouds"};
  app.require_subcommand(1);

  // encode
  std::string in_path, out_path, stats_path, model_path;
  double qg = 1.0, lambda = 1.0, threshold = 30.0, dc_bar = -1.0, scale = 1.0;
  uint32_t qa = 40;
  bool lossless = false, no_linear = false;
  auto* enc_cmd = app.add_subcommand("encode", "Encode a PLY cloud into a stream");
  enc_cmd->add_option("--input", in_path, "Input PLY")->required()->check(CLI::ExistingFile);
  enc_cmd->add_option("--output", out_path, "Output stream")->required();
  enc_cmd->add_option("--qg", qg, "Geometry step")->check(CLI::PositiveNumber);
  enc_cmd->add_option("--qa", qa, "Angular resolution")->check(CLI::Range(1u, 65535u));
  enc_cmd->add_option("--lambda", lambda, "RDO lambda");
  enc_cmd->add_option("--threshold", threshold, "Mode-decision threshold T");
  enc_cmd->add_option("--dc-bar", dc_bar, "Fast-RDO spacing tolerance (default qg/2)");
  enc_cmd->add_option("--scale", scale, "Units per voxel on ingest")->check(CLI::PositiveNumber);
  enc_cmd->add_option("--model", model_path, "Fitted lambda model; derives qg and T from --lambda")
      ->check(CLI::ExistingFile);
  enc_cmd->add_flag("--lossless", lossless, "Exact round-trip (per-point offsets + lossless leaves)");
  enc_cmd->add_flag("--no-linear", no_linear, "Disable the linear-model path");
  enc_cmd->add_option("--stats", stats_path, "Write encoder stats JSON here");

  // decode
  std::string dec_in, dec_out;
  bool binary_ply = false;
  auto* dec_cmd = app.add_subcommand("decode", "Decode a stream back to PLY");
  dec_cmd->add_option("--input", dec_in, "Input stream")->required()->check(CLI::ExistingFile);
  dec_cmd->add_option("--output", dec_out, "Output PLY")->required();
  dec_cmd->add_flag("--binary", binary_ply, "Write binary_little_endian PLY");

  // eval
  std::string ref_path, test_path, cloud_label = "-", mode_label = "-";
  uint32_t normals_k = 12;
  double peak = 0, eval_qg = 0, eval_bpp = 0;
  bool no_header = false;
  auto* eval_cmd = app.add_subcommand("eval", "D1/D2 distortion of test vs reference");
  eval_cmd->add_option("--ref", ref_path, "Reference PLY")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", test_path, "Test PLY")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--normals-k", normals_k, "Neighbors for normal estimation")
      ->check(CLI::Range(3u, 1000u));
  eval_cmd->add_option("--peak", peak, "Fixed PSNR peak (default: reference bbox edge)");
  eval_cmd->add_option("--cloud", cloud_label, "Label for the CSV row");
  eval_cmd->add_option("--mode", mode_label, "Mode label for the CSV row");
  eval_cmd->add_option("--qg", eval_qg, "Qg column value");
  eval_cmd->add_option("--bpp", eval_bpp, "Bits-per-point column value");
  eval_cmd->add_flag("--no-header", no_header, "Suppress the CSV header row");

  // bdrate
  std::string anchor_path, curve_path, plot_path;
  auto* bd_cmd = app.add_subcommand("bdrate", "Bjontegaard delta rate between two RD curves");
  bd_cmd->add_option("--anchor", anchor_path, "Anchor curve CSV (rate,psnr)")
      ->required()->check(CLI::ExistingFile);
  bd_cmd->add_option("--test", curve_path, "Test curve CSV (rate,psnr)")
      ->required()->check(CLI::ExistingFile);
  bd_cmd->add_option("--emit-plot-script", plot_path, "Write a gnuplot script here");

  // sweep
  std::string sweep_dir, sweep_out, sweep_model;
  SweepConfig sweep_cfg;
  auto* sweep_cmd = app.add_subcommand("sweep", "Per-lambda (Qg, T) optimization over a corpus");
  sweep_cmd->add_option("--inputs", sweep_dir, "Directory of PLY clouds")
      ->required()->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--out", sweep_out, "Output CSV")->required();
  sweep_cmd->add_option("--lambdas", sweep_cfg.lambdas, "Lambda grid");
  sweep_cmd->add_option("--qg-grid", sweep_cfg.qg_grid, "Qg grid");
  sweep_cmd->add_option("--model", sweep_model, "Also write the fitted model here");

  // fit-lambda
  std::string fit_in, fit_out;
  auto* fit_cmd = app.add_subcommand("fit-lambda", "Fit exponential Qg(lambda), T(lambda) from a sweep CSV");
  fit_cmd->add_option("--in", fit_in, "Sweep CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--out", fit_out, "Model output file")->required();

  // gen-synthetic
  SyntheticConfig syn;
  uint32_t points_per_line = 50;
  std::string syn_out;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a seeded synthetic line cloud");
  gen_cmd->add_option("--lines", syn.lines, "Number of segments")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--points-per-line", points_per_line, "Points per segment")
      ->check(CLI::Range(2u, 1000000u));
  gen_cmd->add_option("--noise", syn.noise_sigma, "Perpendicular Gaussian sigma, voxels")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--box", syn.extent, "Cube edge, voxels")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", syn.seed, "RNG seed");
  gen_cmd->add_option("--uniform-fraction", syn.uniform_fraction, "Clutter fraction")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--output", syn_out, "Output PLY (+ .lines.txt sidecar)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*enc_cmd) {
      PointCloud cloud = read_ply(in_path, {.keep_duplicates = false, .scale = scale});
      EncoderConfig cfg;
      cfg.quant.q_g = qg;
      cfg.quant.q_a = qa;
      cfg.rdo.lambda = lambda;
      cfg.rdo.threshold = threshold;
      cfg.lossless = lossless;
      cfg.linear_enabled = !no_linear;
      if (!model_path.empty()) {
        LambdaModel m = load_lambda_model(model_path);
        cfg.quant.q_g = m.qg_of(lambda);
        cfg.rdo.threshold = m.t_of(lambda);
      }
      cfg.rdo.d_c_bar = dc_bar > 0 ? dc_bar : cfg.quant.q_g / 2.0;
      auto [stream, stats] = encode(cloud, cfg);
      write_bytes(out_path, stream);
      double bpp = double(stream.size()) * 8.0 / double(cloud.size());
      std::cout << "points=" << cloud.size() << " bytes=" << stream.size()
                << " bpp=" << bpp << " qg=" << cfg.quant.q_g
                << " threshold=" << cfg.rdo.threshold
                << " lines=" << stats.lines_coded << "\n";
      if (!stats_path.empty()) {
        std::ofstream f(stats_path);
        if (!f) throw Error("cannot open " + stats_path + " for writing");
        f << stats.to_json() << "\n";
      }
    } else if (*dec_cmd) {
      PointCloud cloud = decode(read_bytes(dec_in));
      write_ply(cloud, dec_out,
                binary_ply ? PlyFormat::BinaryLittleEndian : PlyFormat::Ascii);
      std::cout << "points=" << cloud.size() << "\n";
    } else if (*eval_cmd) {
      PointCloud ref = read_ply(ref_path);
      PointCloud test = read_ply(test_path);
      DistortionReport r = evaluate(ref, test, normals_k, peak);
      if (!no_header) std::cout << "cloud,mode,qg,bpp,d1_psnr,d2_psnr\n";
      std::cout << cloud_label << ',' << mode_label << ',' << eval_qg << ','
                << eval_bpp << ',' << print_psnr(r.d1_psnr) << ','
                << print_psnr(r.d2_psnr) << "\n";
    } else if (*bd_cmd) {
      RdCurve anchor = read_curve(anchor_path);
      RdCurve test = read_curve(curve_path);
      double bd = bd_rate(anchor, test);
      std::cout << "bd_rate_percent=" << bd << "\n";
      if (!plot_path.empty()) {
        std::ofstream f(plot_path);
        if (!f) throw Error("cannot open " + plot_path + " for writing");
        f << "set datafile separator ','\n"
          << "set xlabel 'bits per point'\nset ylabel 'PSNR (dB)'\n"
          << "set key bottom right\nset grid\n"
          << "plot '" << anchor_path << "' using 1:2 with linespoints title 'anchor', \\\n"
          << "     '" << curve_path << "' using 1:2 with linespoints title 'test'\n";
      }
    } else if (*sweep_cmd) {
      sweep_cfg.threads = env_threads();
      EncoderConfig base;
      base.rdo.d_c_bar = dc_bar > 0 ? dc_bar : 0.5;
      SweepResult r = sweep_and_fit(read_cloud_dir(sweep_dir), sweep_cfg, base);
      std::ofstream f(sweep_out);
      if (!f) throw Error("cannot open " + sweep_out + " for writing");
      f << sweep_csv(r);
      if (!sweep_model.empty()) save_lambda_model(r.model, sweep_model);
      std::cout << "qg_alpha=" << r.model.qg_alpha << " qg_beta=" << r.model.qg_beta
                << " t_gamma=" << r.model.t_gamma << " t_delta=" << r.model.t_delta
                << "\n";
    } else if (*fit_cmd) {
      SweepCsv csv = read_sweep_csv(fit_in);
      LambdaModel m;
      std::vector<double> res_qg, res_t;
      std::tie(m.qg_alpha, m.qg_beta) = fit_exponential(csv.lambdas, csv.qg, &res_qg);
      auto [gamma, minus_delta] = fit_exponential(csv.lambdas, csv.t, &res_t);
      m.t_gamma = gamma;
      m.t_delta = -minus_delta;
      m.fit_residuals = res_qg;
      m.fit_residuals.insert(m.fit_residuals.end(), res_t.begin(), res_t.end());
      save_lambda_model(m, fit_out);
      std::cout << "qg_alpha=" << m.qg_alpha << " qg_beta=" << m.qg_beta
                << " t_gamma=" << m.t_gamma << " t_delta=" << m.t_delta
                << " residuals=[";
      for (size_t i = 0; i < m.fit_residuals.size(); ++i)
        std::cout << (i ? "," : "") << m.fit_residuals[i];
      std::cout << "]\n";
    } else if (*gen_cmd) {
      syn.min_points_per_line = points_per_line;
      syn.max_points_per_line = points_per_line;
      SyntheticCloud sc = gen_synthetic(syn);
      write_ply(sc.cloud, syn_out);
      write_ground_truth(sc.lines, syn_out + ".lines.txt");
      std::cout << "points=" << sc.cloud.size() << " lines=" << sc.lines.size() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
