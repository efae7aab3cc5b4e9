#include "fctn/completion.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fctn {

double observed_rel_residual(const Problem& p, const FactorSet& fs) {
  const DenseTensor composed = fctn_compose(fs);
  double diff_sq = 0.0, denom_sq = 0.0;
  const double* t = p.observed.data();
  const double* w = p.mask.data();
  const double* x = composed.data();
  for (std::int64_t i = 0; i < composed.size(); ++i) {
    const double d = w[i] * (t[i] - x[i]);
    diff_sq += d * d;
    const double o = w[i] * t[i];
    denom_sq += o * o;
  }
  return std::sqrt(diff_sq) / std::max(std::sqrt(denom_sq), 1e-300);
}

CompletionResult complete(const Problem& p, const CompletionConfig& cfg) {
  if (p.observed_count() == 0)
    throw std::invalid_argument("complete: mask has no observed entry");
  if (cfg.ranks.n != static_cast<int>(p.observed.dims().size()))
    throw std::invalid_argument("complete: rank matrix order does not match the data");

  const auto tic = std::chrono::steady_clock::now();

  FactorSet fs0 = init_factors(p.observed.dims(), cfg.ranks, cfg.seed, p.observed, p.mask);
  ParamVector x0 = pack(fs0);
  const FactorLayout layout = x0.layout;

  Objective eval = [&p, &layout](std::span<const double> x, std::span<double> grad) {
    const FactorSet fs = unpack(x, layout);
    const ParamVector g = full_gradient(p, fs);
    std::copy(g.values.begin(), g.values.end(), grad.begin());
    return loss(p, fs);
  };

  // The observed relative residual follows from the objective:
  // loss = 1/2 r^2 * denom^2 with r the residual, so no extra composition is
  // needed per iteration.
  const double denom = std::max(frobenius_norm(hadamard(p.mask, p.observed)), 1e-300);
  auto residual_of = [denom](double objective) { return std::sqrt(2.0 * objective) / denom; };

  double last_residual = -1.0;
  bool have_last = false;
  Monitor monitor = [&](const IterTrace& t, std::span<const double>) {
    const double residual = residual_of(t.objective);
    const bool stalled = have_last && std::abs(last_residual - residual) < cfg.outer_tol;
    last_residual = residual;
    have_last = true;
    return !stalled;
  };

  LbfgsOptions opts = cfg.lbfgs;
  opts.max_iters = cfg.outer_max_iters;
  MinimizeResult min = minimize(eval, std::move(x0.values), opts, monitor);

  SolveReport report;
  report.iterations.reserve(min.trace.size());
  for (const IterTrace& t : min.trace)
    report.iterations.push_back(
        {t.iter, t.objective, t.grad_inf_norm, residual_of(t.objective), t.step_length,
         t.elapsed_ms});

  CompletionResult result;
  result.factors = unpack(min.x, layout);
  report.status = min.status;
  report.evaluations = min.evaluations;
  report.n_params = layout.total;
  report.final_observed_rel_residual = observed_rel_residual(p, result.factors);

  // Observed positions keep the input bit-for-bit; the rest take the fit.
  result.recovered = fctn_compose(result.factors);
  {
    double* x = result.recovered.data();
    const double* t = p.observed.data();
    const double* w = p.mask.data();
    for (std::int64_t i = 0; i < result.recovered.size(); ++i)
      if (w[i] == 1.0) x[i] = t[i];
  }

  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tic).count();
  result.report = std::move(report);
  return result;
}

FactorSet decompose(const DenseTensor& x, const CompletionConfig& cfg) {
  Problem p(x, DenseTensor::ones(x.dims()), cfg.ranks);
  return complete(p, cfg).factors;
}

}  // namespace fctn
