#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fctn {

/// Tuning knobs for the limited-memory BFGS minimizer.
struct LbfgsOptions {
  int memory = 10;                 // curvature pairs kept for the two-loop recursion
  int max_iters = 200;
  double grad_tol = 1e-8;          // stop when the max-norm of the gradient drops below
  double rel_obj_tol = 1e-16;      // stop when the relative objective decrease drops below
  double wolfe_c1 = 1e-4;          // sufficient-decrease coefficient
  double wolfe_c2 = 0.9;           // curvature coefficient
  int max_linesearch_steps = 20;   // function evaluations per line search

  /// Throws std::invalid_argument unless 0 < c1 < c2 < 1, memory >= 1 and all
  /// tolerances are positive.
  void validate() const;
};

enum class LbfgsStatus {
  grad_converged,
  obj_converged,
  max_iters,
  linesearch_failed,
  monitor_stop,  // the per-iteration monitor asked to stop
};

std::string to_string(LbfgsStatus status);

/// One row per accepted iterate (row 0 is the starting point).
struct IterTrace {
  int iter = 0;
  double objective = 0.0;
  double grad_inf_norm = 0.0;
  double step_length = 0.0;
  double elapsed_ms = 0.0;  // time spent in this iteration
};

/// Objective callback: writes the gradient at x into `grad` and returns f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Called after each accepted iteration; return false to stop early.
using Monitor = std::function<bool(const IterTrace& trace, std::span<const double> x)>;

struct MinimizeResult {
  std::vector<double> x;
  std::vector<IterTrace> trace;
  LbfgsStatus status = LbfgsStatus::max_iters;
  int evaluations = 0;
};

/// Minimizes `eval` from x0 by L-BFGS: two-loop recursion over the most
/// recent curvature pairs (pairs with s.y <= 1e-10 ||s|| ||y|| are skipped),
/// initial Hessian seed gamma = s.y / y.y, strong Wolfe line search, and a
/// normalized steepest-descent first step. A failed line search clears the
/// history and retries once along the steepest descent before giving up.
/// Throws std::invalid_argument on a non-finite objective or gradient at x0.
MinimizeResult minimize(const Objective& eval, std::vector<double> x0,
                        const LbfgsOptions& opts, const Monitor& monitor = {});

struct LineSearchResult {
  double step = 0.0;
  bool success = false;       // a point with sufficient decrease was taken
  bool strong_wolfe = false;  // both Wolfe conditions verified at `step`
  int evaluations = 0;
};

/// Strong Wolfe line search (bracket + interpolating zoom) along a descent
/// direction. On success writes the accepted point, objective and gradient
/// into the out parameters. Falls back to the best Armijo-only point when the
/// evaluation budget runs out before both conditions hold. Throws
/// std::invalid_argument when `direction` is not a descent direction.
LineSearchResult line_search(const Objective& eval, std::span<const double> x,
                             std::span<const double> direction, double f0,
                             std::span<const double> g0, const LbfgsOptions& opts,
                             std::vector<double>& x_out, double& f_out,
                             std::vector<double>& g_out);

}  // namespace fctn
