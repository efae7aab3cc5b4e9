#include "fctn/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "fctn/mask.hpp"
#include "fctn/metrics.hpp"
#include "fctn/objective.hpp"
#include "fctn/tensor_io.hpp"

namespace fctn {

namespace {

using nlohmann::json;

std::string json_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_string(const std::string& s) { return json(s).dump(); }

RankMatrix rank_matrix_from_array(const json& rows, const std::string& where) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::int64_t> entries;
  entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (const json& row : rows) {
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw std::invalid_argument(where + ": rank matrix must be square");
    for (const json& v : row) {
      if (!v.is_number_integer())
        throw std::invalid_argument(where + ": rank entries must be integers");
      entries.push_back(v.get<std::int64_t>());
    }
  }
  return RankMatrix(n, std::move(entries));
}

RankSpec rank_spec_from_json(const json& value, const std::string& where) {
  RankSpec spec;
  const json* v = &value;
  if (v->is_object()) {
    if (!v->contains("ranks")) throw std::invalid_argument(where + ": missing \"ranks\" key");
    v = &v->at("ranks");
  }
  if (v->is_number_integer())
    spec.scalar = v->get<std::int64_t>();
  else if (v->is_array())
    spec.matrix = rank_matrix_from_array(*v, where);
  else
    throw std::invalid_argument(where + ": ranks must be an integer or an NxN array");
  return spec;
}

LbfgsOptions parse_lbfgs(const json& j, LbfgsOptions base) {
  if (j.contains("memory")) base.memory = j.at("memory").get<int>();
  if (j.contains("grad_tol")) base.grad_tol = j.at("grad_tol").get<double>();
  if (j.contains("rel_obj_tol")) base.rel_obj_tol = j.at("rel_obj_tol").get<double>();
  if (j.contains("c1")) base.wolfe_c1 = j.at("c1").get<double>();
  if (j.contains("c2")) base.wolfe_c2 = j.at("c2").get<double>();
  if (j.contains("max_linesearch_steps"))
    base.max_linesearch_steps = j.at("max_linesearch_steps").get<int>();
  return base;
}

int thread_count() {
  const char* env = std::getenv("FCTN_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n < 1 ? 1 : n;
}

void emit_iter_row(std::ostream& out, const SolveReport::Row& row, const char* prefix) {
  out << "{\"type\":\"iter\"" << prefix << ",\"iter\":" << row.iter
      << ",\"loss\":" << json_number(row.loss)
      << ",\"grad_norm\":" << json_number(row.grad_inf_norm)
      << ",\"observed_rel_residual\":" << json_number(row.observed_rel_residual)
      << ",\"elapsed_ms\":" << json_number(row.elapsed_ms) << "}\n";
}

void emit_final_row(std::ostream& out, const ExperimentRecord& r) {
  out << "{\"type\":\"final\",\"sampling_rate\":" << json_number(r.sampling_rate)
      << ",\"seed\":" << r.seed << ",\"psnr\":" << json_number(r.psnr)
      << ",\"ssim\":" << json_number(r.ssim) << ",\"rel_error\":" << json_number(r.rel_error)
      << ",\"wall_ms\":" << json_number(r.wall_ms) << ",\"n_params\":" << r.n_params
      << ",\"status\":" << json_string(r.status);
  if (!r.error.empty()) out << ",\"error\":" << json_string(r.error);
  out << "}\n";
}

}  // namespace

RankMatrix RankSpec::resolve(int order) const {
  if (matrix) {
    if (matrix->n != order)
      throw std::invalid_argument("rank matrix is " + std::to_string(matrix->n) + "x" +
                                  std::to_string(matrix->n) + " but the tensor order is " +
                                  std::to_string(order));
    return *matrix;
  }
  if (scalar) return RankMatrix::uniform(order, *scalar);
  throw std::invalid_argument("no ranks given");
}

RankSpec parse_rank_spec(const std::string& json_text) {
  return rank_spec_from_json(json::parse(json_text), "ranks");
}

RankSpec load_rank_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rank file " + path.string());
  return rank_spec_from_json(json::parse(in), path.string());
}

void write_solve_report(const std::filesystem::path& path, const SolveReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const SolveReport::Row& row : report.iterations) emit_iter_row(out, row, "");
  out << "{\"type\":\"final\",\"status\":" << json_string(to_string(report.status))
      << ",\"observed_rel_residual\":" << json_number(report.final_observed_rel_residual)
      << ",\"wall_ms\":" << json_number(report.wall_ms) << ",\"n_params\":" << report.n_params
      << ",\"evaluations\":" << report.evaluations << "}\n";
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json j = json::parse(in);

  ExperimentConfig cfg;
  cfg.input_path = j.at("input").get<std::string>();
  cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.ranks = rank_spec_from_json(j.at("ranks"), path.string());

  cfg.sampling_rates = j.at("sampling_rates").get<std::vector<double>>();
  if (cfg.sampling_rates.empty())
    throw std::invalid_argument(path.string() + ": sampling_rates must be nonempty");
  for (double r : cfg.sampling_rates)
    if (!(r > 0.0) || r > 1.0)
      throw std::invalid_argument(path.string() + ": sampling rates must be in (0, 1]");

  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (cfg.seeds.empty()) throw std::invalid_argument(path.string() + ": seeds must be nonempty");

  if (j.contains("maxiter")) cfg.maxiter = j.at("maxiter").get<int>();
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("lbfgs")) cfg.lbfgs = parse_lbfgs(j.at("lbfgs"), cfg.lbfgs);
  if (j.contains("peak")) cfg.peak = j.at("peak").get<double>();

  if (j.contains("reshape")) {
    const json& r = j.at("reshape");
    if (r.contains("dims")) cfg.reshape_dims = r.at("dims").get<std::vector<std::int64_t>>();
    if (r.contains("permute")) cfg.reshape_permute = r.at("permute").get<std::vector<int>>();
  }
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  DenseTensor truth = read_tensor(cfg.input_path);
  if (cfg.reshape_dims) truth = reshape(truth, *cfg.reshape_dims);
  if (cfg.reshape_permute) truth = permute(truth, *cfg.reshape_permute);

  const RankMatrix ranks = cfg.ranks.resolve(truth.order());

  struct Job {
    double rate;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double rate : cfg.sampling_rates)
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({rate, seed});

  ExperimentResult result;
  result.records.resize(jobs.size());

  auto run_job = [&](std::size_t i) {
    const Job& job = jobs[i];
    ExperimentRecord& rec = result.records[i];
    rec.sampling_rate = job.rate;
    rec.seed = job.seed;
    try {
      ObservationMask om = gen_mask(truth.dims(), job.rate, job.seed);
      Problem p(truth, std::move(om.mask), ranks);

      CompletionConfig run;
      run.ranks = ranks;
      run.seed = job.seed;
      run.lbfgs = cfg.lbfgs;
      run.outer_tol = cfg.tol;
      run.outer_max_iters = cfg.maxiter;
      CompletionResult completed = complete(p, run);

      const MetricReport m = evaluate_metrics(truth, completed.recovered, cfg.peak, cfg.peak);
      rec.psnr = m.psnr;
      rec.ssim = m.ssim;
      rec.rel_error = m.rel_error;
      rec.wall_ms = completed.report.wall_ms;
      rec.n_params = completed.report.n_params;
      rec.status = to_string(completed.report.status);
      rec.iterations = std::move(completed.report.iterations);
    } catch (const std::exception& e) {
      rec.status = "error";
      rec.error = e.what();
    }
  };

  const int threads = std::min<int>(thread_count(), static_cast<int>(jobs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_job(i);
      });
    for (std::thread& t : pool) t.join();
  }

  // Single-writer assembly in sweep order; rerunning the same config rewrites
  // both files from scratch.
  std::filesystem::create_directories(cfg.output_dir);
  result.records_path = std::filesystem::path(cfg.output_dir) / "records.jsonl";
  result.summary_path = std::filesystem::path(cfg.output_dir) / "summary.csv";

  std::ofstream records(result.records_path, std::ios::trunc);
  if (!records) throw std::runtime_error("cannot write " + result.records_path.string());
  records << "{\"type\":\"meta\",\"input\":" << json_string(cfg.input_path)
          << ",\"mask_algorithm\":\"mt19937_64/partial-fisher-yates\""
          << ",\"maxiter\":" << cfg.maxiter << ",\"tol\":" << json_number(cfg.tol)
          << ",\"peak\":" << json_number(cfg.peak) << "}\n";
  for (const ExperimentRecord& rec : result.records) {
    char prefix[80];
    std::snprintf(prefix, sizeof(prefix), ",\"sampling_rate\":%s,\"seed\":%llu",
                  json_number(rec.sampling_rate).c_str(),
                  static_cast<unsigned long long>(rec.seed));
    for (const SolveReport::Row& row : rec.iterations) emit_iter_row(records, row, prefix);
    emit_final_row(records, rec);
  }
  records.close();

  std::ofstream csv(result.summary_path, std::ios::trunc);
  if (!csv) throw std::runtime_error("cannot write " + result.summary_path.string());
  csv << "sampling_rate,mean_psnr,mean_ssim\n";
  for (double rate : cfg.sampling_rates) {
    double psnr_sum = 0.0, ssim_sum = 0.0;
    int ok = 0;
    for (const ExperimentRecord& rec : result.records) {
      if (rec.sampling_rate == rate && rec.error.empty()) {
        psnr_sum += psnr_table_value(rec.psnr);
        ssim_sum += rec.ssim;
        ++ok;
      }
    }
    const double mean_psnr = ok ? psnr_sum / ok : std::numeric_limits<double>::quiet_NaN();
    const double mean_ssim = ok ? ssim_sum / ok : std::numeric_limits<double>::quiet_NaN();
    char line[96];
    std::snprintf(line, sizeof(line), "%.4f,%.6f,%.6f\n", rate, mean_psnr, mean_ssim);
    csv << line;
  }
  return result;
}

}  // namespace fctn
