// Command-line front end: tensor completion, decomposition, mask generation,
// metric evaluation, experiment sweeps and CSV conversion over the DTEN
// binary tensor format.
#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fctn/completion.hpp"
#include "fctn/experiment.hpp"
#include "fctn/mask.hpp"
#include "fctn/metrics.hpp"
#include "fctn/network.hpp"
#include "fctn/tensor_io.hpp"

namespace {

std::vector<std::int64_t> parse_dims(const std::string& text) {
  std::vector<std::int64_t> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) dims.push_back(std::stoll(part));
  if (dims.empty()) throw std::invalid_argument("empty dim list '" + text + "'");
  return dims;
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  if (std::isnan(v)) return "NaN";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct SolveFlags {
  std::string input, ranks, out, report;
  double tol = 1e-5;
  int maxiter = 200;
  std::uint64_t seed = 0;
  fctn::LbfgsOptions lbfgs;

  void attach(CLI::App* cmd, bool with_mask, std::string* mask) {
    cmd->add_option("--input", input, "input tensor (.dten)")->required();
    if (with_mask)
      cmd->add_option("--mask", *mask, "0/1 observation mask (.dten)")->required();
    cmd->add_option("--ranks", ranks, "bond dimensions: JSON file with a scalar or an NxN matrix")
        ->required();
    cmd->add_option("--tol", tol, "stop when the observed relative residual stalls by less");
    cmd->add_option("--maxiter", maxiter, "iteration cap");
    cmd->add_option("--seed", seed, "factor initialization seed");
    cmd->add_option("--report", report, "write a JSON-lines iteration report here");
    cmd->add_option("--lbfgs-memory", lbfgs.memory, "curvature pairs kept");
    cmd->add_option("--grad-tol", lbfgs.grad_tol, "gradient max-norm tolerance");
    cmd->add_option("--wolfe-c1", lbfgs.wolfe_c1, "sufficient-decrease coefficient");
    cmd->add_option("--wolfe-c2", lbfgs.wolfe_c2, "curvature coefficient");
  }

  fctn::CompletionConfig config(int order) const {
    fctn::CompletionConfig cfg;
    cfg.ranks = fctn::load_rank_spec(ranks).resolve(order);
    cfg.seed = seed;
    cfg.lbfgs = lbfgs;
    cfg.outer_tol = tol;
    cfg.outer_max_iters = maxiter;
    return cfg;
  }
};

int run_complete(const SolveFlags& flags, const std::string& mask_path, const std::string& out) {
  const fctn::DenseTensor data = fctn::read_tensor(flags.input);
  const fctn::DenseTensor mask = fctn::read_tensor(mask_path);
  const fctn::CompletionConfig cfg = flags.config(data.order());
  fctn::Problem problem(data, mask, cfg.ranks);
  const fctn::CompletionResult result = fctn::complete(problem, cfg);
  fctn::write_tensor(out, result.recovered);
  if (!flags.report.empty()) fctn::write_solve_report(flags.report, result.report);
  std::cout << "status=" << to_string(result.report.status)
            << " observed_rel_residual=" << fmt_double(result.report.final_observed_rel_residual)
            << " iters=" << result.report.iterations.size() - 1
            << " n_params=" << result.report.n_params
            << " wall_ms=" << fmt_double(result.report.wall_ms) << "\n";
  return 0;
}

int run_decompose(const SolveFlags& flags, const std::string& out,
                  const std::string& factors_dir) {
  const fctn::DenseTensor data = fctn::read_tensor(flags.input);
  const fctn::CompletionConfig cfg = flags.config(data.order());
  fctn::Problem problem(data, fctn::DenseTensor::ones(data.dims()), cfg.ranks);
  const fctn::CompletionResult result = fctn::complete(problem, cfg);

  const fctn::DenseTensor fit = fctn_compose(result.factors);
  if (!out.empty()) fctn::write_tensor(out, fit);
  if (!factors_dir.empty()) {
    std::filesystem::create_directories(factors_dir);
    for (std::size_t k = 0; k < result.factors.factors.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "factor_%02zu.dten", k + 1);
      fctn::write_tensor(std::filesystem::path(factors_dir) / name, result.factors.factors[k]);
    }
  }
  if (!flags.report.empty()) fctn::write_solve_report(flags.report, result.report);
  std::cout << "status=" << to_string(result.report.status)
            << " fit_rel_error=" << fmt_double(fctn::rel_error(data, fit))
            << " iters=" << result.report.iterations.size() - 1
            << " n_params=" << result.report.n_params << "\n";
  return 0;
}

int run_mask(const std::string& dims_text, double rate, std::uint64_t seed,
             const std::string& out) {
  const fctn::ObservationMask m = fctn::gen_mask(parse_dims(dims_text), rate, seed);
  fctn::write_tensor(out, m.mask);
  std::ofstream meta(out + ".meta.json", std::ios::trunc);
  meta << "{\"rate\":" << fmt_double(m.rate) << ",\"seed\":" << m.seed
       << ",\"observed_count\":" << m.observed_count << ",\"algorithm\":\"" << m.algorithm
       << "\"}\n";
  std::cout << "observed " << m.observed_count << " of " << m.mask.size() << " entries\n";
  return 0;
}

int run_metrics(const std::string& truth_path, const std::string& estimate_path, double peak,
                bool as_json) {
  const fctn::DenseTensor truth = fctn::read_tensor(truth_path);
  const fctn::DenseTensor estimate = fctn::read_tensor(estimate_path);
  const fctn::MetricReport r = fctn::evaluate_metrics(truth, estimate, peak, peak);
  if (as_json) {
    std::cout << "{\"rel_error\":" << fmt_double(r.rel_error) << ",\"mse\":" << fmt_double(r.mse)
              << ",\"psnr\":" << fmt_double(r.psnr) << ",\"ssim\":" << fmt_double(r.ssim)
              << "}\n";
  } else {
    std::printf("rel_error  %.6g\n", r.rel_error);
    std::printf("mse        %.6g\n", r.mse);
    std::printf("psnr_db    %.4f\n", fctn::psnr_table_value(r.psnr));
    std::printf("ssim       %.6f\n", r.ssim);
  }
  return 0;
}

int run_convert(const std::string& csv_path, const std::string& dims_text,
                const std::string& out) {
  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("cannot open " + csv_path);

  std::vector<std::int64_t> dims;
  if (!dims_text.empty()) dims = parse_dims(dims_text);

  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      // Header form: "# dims: 60,24,30,46"
      const auto pos = line.find("dims:");
      if (pos != std::string::npos && dims.empty()) dims = parse_dims(line.substr(pos + 5));
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      if (!cell.empty()) values.push_back(std::stod(cell));
  }
  if (dims.empty())
    throw std::invalid_argument(csv_path + ": no dims given (use --dims or a '# dims:' header)");
  fctn::write_tensor(out, fctn::DenseTensor(dims, std::move(values)));
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor completion by fully-connected tensor network weighted optimization"};
  app.require_subcommand(1);

  SolveFlags complete_flags;
  std::string complete_mask, complete_out;
  CLI::App* complete = app.add_subcommand("complete", "fill a partially observed tensor");
  complete_flags.attach(complete, true, &complete_mask);
  complete->add_option("--out", complete_out, "recovered tensor (.dten)")->required();

  SolveFlags decompose_flags;
  std::string decompose_out, decompose_factors;
  CLI::App* decompose = app.add_subcommand("decompose", "fit the network to a full tensor");
  decompose_flags.attach(decompose, false, nullptr);
  decompose->add_option("--out", decompose_out, "composed fit (.dten)");
  decompose->add_option("--factors-dir", decompose_factors, "write factor_XX.dten files here");

  std::string mask_dims, mask_out;
  double mask_rate = 0.5;
  std::uint64_t mask_seed = 0;
  CLI::App* mask = app.add_subcommand("mask", "draw a random observation mask");
  mask->add_option("--dims", mask_dims, "comma-separated dims, e.g. 4,4,4")->required();
  mask->add_option("--rate", mask_rate, "sampling rate in (0,1]")->required();
  mask->add_option("--seed", mask_seed, "PRNG seed");
  mask->add_option("--out", mask_out, "mask tensor (.dten)")->required();

  std::string metrics_truth, metrics_estimate;
  double metrics_peak = 255.0;
  bool metrics_json = false;
  CLI::App* metrics = app.add_subcommand("metrics", "score an estimate against ground truth");
  metrics->add_option("--truth", metrics_truth)->required();
  metrics->add_option("--estimate", metrics_estimate)->required();
  metrics->add_option("--peak", metrics_peak, "PSNR peak / SSIM dynamic range");
  metrics->add_flag("--json", metrics_json, "print one JSON object instead of a table");

  std::string experiment_config;
  CLI::App* experiment = app.add_subcommand("experiment", "run a sampling-rate sweep");
  experiment->add_option("--config", experiment_config, "JSON config file")->required();

  std::string convert_csv, convert_dims, convert_out;
  CLI::App* convert = app.add_subcommand("convert", "flat CSV to tensor file");
  convert->add_option("--from-csv", convert_csv, "CSV of values, row-major")->required();
  convert->add_option("--dims", convert_dims, "dims when the CSV has no '# dims:' header");
  convert->add_option("--out", convert_out, "output tensor (.dten)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (complete->parsed()) return run_complete(complete_flags, complete_mask, complete_out);
    if (decompose->parsed()) {
      if (decompose_out.empty() && decompose_factors.empty())
        throw std::invalid_argument("decompose: give --out and/or --factors-dir");
      return run_decompose(decompose_flags, decompose_out, decompose_factors);
    }
    if (mask->parsed()) return run_mask(mask_dims, mask_rate, mask_seed, mask_out);
    if (metrics->parsed())
      return run_metrics(metrics_truth, metrics_estimate, metrics_peak, metrics_json);
    if (experiment->parsed()) {
      const fctn::ExperimentResult r =
          fctn::run_experiment(fctn::load_experiment_config(experiment_config));
      std::cout << "wrote " << r.records_path.string() << " and " << r.summary_path.string()
                << "\n";
      return 0;
    }
    if (convert->parsed()) return run_convert(convert_csv, convert_dims, convert_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
