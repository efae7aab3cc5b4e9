#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fctn/completion.hpp"
#include "fctn/network.hpp"

namespace fctn {

/// Bond dimensions as they appear in JSON inputs: either a scalar shorthand
/// (expands to the all-equal off-diagonal matrix once the order is known) or
/// an explicit NxN matrix.
struct RankSpec {
  std::optional<std::int64_t> scalar;
  std::optional<RankMatrix> matrix;

  /// Throws std::invalid_argument when empty or when an explicit matrix does
  /// not match the order.
  RankMatrix resolve(int order) const;
};

/// Accepts `3`, `[[...]]`, or an object wrapping either under a "ranks" key.
RankSpec parse_rank_spec(const std::string& json_text);
RankSpec load_rank_spec(const std::filesystem::path& path);

/// Writes a solve report as JSON-lines: one {"type":"iter",...} row per
/// iteration and a closing {"type":"final",...} summary row. Non-finite
/// numbers are emitted as Infinity / -Infinity / NaN tokens.
void write_solve_report(const std::filesystem::path& path, const SolveReport& report);

/// Sampling-rate sweep over a ground-truth tensor: for every (rate, seed)
/// pair the input is masked, completed and scored, producing JSON-lines
/// records plus a per-rate summary CSV.
struct ExperimentConfig {
  std::string input_path;
  RankSpec ranks;

  std::vector<double> sampling_rates;
  std::vector<std::uint64_t> seeds{0};

  int maxiter = 500;
  double tol = 1e-4;
  LbfgsOptions lbfgs;

  // Optional retensorization applied to the input before the sweep: row-major
  // reshape, then mode permutation.
  std::optional<std::vector<std::int64_t>> reshape_dims;
  std::optional<std::vector<int>> reshape_permute;

  double peak = 255.0;  // PSNR peak and SSIM dynamic range

  std::string output_dir;
};

/// Parses a JSON config file; see the README for the schema.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// One completed (rate, seed) job.
struct ExperimentRecord {
  double sampling_rate = 0.0;
  std::uint64_t seed = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  double rel_error = 0.0;
  double wall_ms = 0.0;
  std::int64_t n_params = 0;
  std::string status;
  std::string error;  // nonempty when the job failed
  std::vector<SolveReport::Row> iterations;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;  // one per (rate, seed), in sweep order
  std::filesystem::path records_path;     // JSON-lines, per-iteration + final records
  std::filesystem::path summary_path;     // CSV: rate, mean psnr, mean ssim
};

/// Runs the sweep. Jobs may run in parallel (FCTN_THREADS environment
/// variable, default 1); outputs are assembled single-writer in deterministic
/// sweep order and overwrite any previous files. A failed job is recorded
/// with its error and the sweep continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace fctn
