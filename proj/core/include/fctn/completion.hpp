#pragma once

#include <cstdint>
#include <vector>

#include "fctn/lbfgs.hpp"
#include "fctn/network.hpp"
#include "fctn/objective.hpp"
#include "fctn/tensor.hpp"

namespace fctn {

/// Settings for one completion run.
struct CompletionConfig {
  RankMatrix ranks;
  std::uint64_t seed = 0;
  LbfgsOptions lbfgs;
  double outer_tol = 1e-5;   // stop when the observed relative residual stalls
  int outer_max_iters = 200; // iteration cap for the joint minimization
};

/// Per-run record: the optimizer trace extended with the observed relative
/// residual, plus run-level totals.
struct SolveReport {
  struct Row {
    int iter = 0;
    double loss = 0.0;
    double grad_inf_norm = 0.0;
    double observed_rel_residual = 0.0;
    double step_length = 0.0;
    double elapsed_ms = 0.0;
  };
  std::vector<Row> iterations;
  LbfgsStatus status = LbfgsStatus::max_iters;
  double final_observed_rel_residual = 0.0;
  double wall_ms = 0.0;
  std::int64_t n_params = 0;
  int evaluations = 0;
};

struct CompletionResult {
  DenseTensor recovered;
  FactorSet factors;
  SolveReport report;
};

/// || mask o (observed - compose(fs)) ||_F / max(|| mask o observed ||_F, 1e-300)
double observed_rel_residual(const Problem& p, const FactorSet& fs);

/// Fits the network to the observed entries by one joint L-BFGS run over all
/// packed factors, then merges: observed positions keep the input data
/// bit-for-bit, unobserved positions take the fitted composition. The run is
/// deterministic for a fixed (data, mask, config). Throws
/// std::invalid_argument when the mask has no observed entry; an optimizer
/// stall is not an error, the result records its status.
CompletionResult complete(const Problem& p, const CompletionConfig& cfg);

/// Completion with a full mask: fits the network to every entry of x and
/// returns the factors.
FactorSet decompose(const DenseTensor& x, const CompletionConfig& cfg);

}  // namespace fctn
