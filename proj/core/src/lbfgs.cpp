#include "fctn/lbfgs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace fctn {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// A probed point along the search ray.
struct Probe {
  double alpha = 0.0;
  double f = std::numeric_limits<double>::infinity();
  double dphi = 0.0;  // directional derivative at alpha
};

// Evaluates phi(alpha) = f(x + alpha d), keeping the best sufficient-decrease
// point seen so its state can be recovered without re-evaluation.
class RayEvaluator {
public:
  RayEvaluator(const Objective& eval, std::span<const double> x, std::span<const double> d,
               double f0, double dphi0, double c1)
      : eval_(eval), x_(x), d_(d), f0_(f0), dphi0_(dphi0), c1_(c1),
        x_trial_(x.size()), g_trial_(x.size()) {}

  Probe operator()(double alpha) {
    for (std::size_t i = 0; i < x_.size(); ++i) x_trial_[i] = x_[i] + alpha * d_[i];
    double f = eval_(x_trial_, g_trial_);
    ++evaluations;
    Probe p;
    p.alpha = alpha;
    if (!std::isfinite(f) || !all_finite(g_trial_)) return p;  // f stays +inf
    p.f = f;
    p.dphi = dot(g_trial_, d_);
    if (armijo(p) && (!has_best_ || p.f < best_.f)) {
      best_ = p;
      best_x_ = x_trial_;
      best_g_ = g_trial_;
      has_best_ = true;
    }
    return p;
  }

  bool armijo(const Probe& p) const { return p.f <= f0_ + c1_ * p.alpha * dphi0_; }

  bool has_best() const { return has_best_; }
  const Probe& best() const { return best_; }
  const std::vector<double>& best_x() const { return best_x_; }
  const std::vector<double>& best_g() const { return best_g_; }

  int evaluations = 0;

private:
  const Objective& eval_;
  std::span<const double> x_;
  std::span<const double> d_;
  double f0_, dphi0_, c1_;
  std::vector<double> x_trial_, g_trial_;
  Probe best_;
  std::vector<double> best_x_, best_g_;
  bool has_best_ = false;
};

// Minimizer of the Hermite cubic through two probed points; falls back to the
// midpoint when the interpolation is degenerate or lands outside the bracket.
double interpolate(const Probe& lo, const Probe& hi) {
  const double mid = 0.5 * (lo.alpha + hi.alpha);
  if (!std::isfinite(hi.f) || !std::isfinite(hi.dphi)) return mid;
  const double d1 = lo.dphi + hi.dphi - 3.0 * (lo.f - hi.f) / (lo.alpha - hi.alpha);
  const double disc = d1 * d1 - lo.dphi * hi.dphi;
  if (disc < 0.0) return mid;
  const double sign = hi.alpha > lo.alpha ? 1.0 : -1.0;
  const double d2 = sign * std::sqrt(disc);
  const double denom = hi.dphi - lo.dphi + 2.0 * d2;
  if (denom == 0.0) return mid;
  double alpha = hi.alpha - (hi.alpha - lo.alpha) * (hi.dphi + d2 - d1) / denom;

  // Keep a safeguarded distance from both ends of the bracket.
  const double a = std::min(lo.alpha, hi.alpha);
  const double b = std::max(lo.alpha, hi.alpha);
  const double margin = 0.1 * (b - a);
  if (!std::isfinite(alpha) || alpha < a + margin || alpha > b - margin) return mid;
  return alpha;
}

}  // namespace

void LbfgsOptions::validate() const {
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
    throw std::invalid_argument("LbfgsOptions: require 0 < c1 < c2 < 1");
  if (memory < 1) throw std::invalid_argument("LbfgsOptions: memory must be >= 1");
  if (!(grad_tol > 0.0) || !(rel_obj_tol > 0.0))
    throw std::invalid_argument("LbfgsOptions: tolerances must be positive");
  if (max_iters < 1) throw std::invalid_argument("LbfgsOptions: max_iters must be >= 1");
  if (max_linesearch_steps < 1)
    throw std::invalid_argument("LbfgsOptions: max_linesearch_steps must be >= 1");
}

std::string to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::grad_converged: return "grad-converged";
    case LbfgsStatus::obj_converged: return "obj-converged";
    case LbfgsStatus::max_iters: return "max-iters";
    case LbfgsStatus::linesearch_failed: return "linesearch-failed";
    case LbfgsStatus::monitor_stop: return "monitor-stop";
  }
  return "unknown";
}

LineSearchResult line_search(const Objective& eval, std::span<const double> x,
                             std::span<const double> direction, double f0,
                             std::span<const double> g0, const LbfgsOptions& opts,
                             std::vector<double>& x_out, double& f_out,
                             std::vector<double>& g_out) {
  const double dphi0 = dot(g0, direction);
  if (!std::isfinite(dphi0) || dphi0 >= 0.0)
    throw std::invalid_argument("line_search: not a descent direction");

  RayEvaluator phi(eval, x, direction, f0, dphi0, opts.wolfe_c1);
  const double curvature_bound = -opts.wolfe_c2 * dphi0;
  const double alpha_max = 1e20;

  LineSearchResult result;
  auto accept = [&](const Probe& p) {
    if (phi.has_best() && phi.best().alpha == p.alpha) {
      x_out = phi.best_x();
      g_out = phi.best_g();
      f_out = phi.best().f;
    } else {
      x_out.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) x_out[i] = x[i] + p.alpha * direction[i];
      g_out.resize(x.size());
      f_out = eval(x_out, g_out);
      ++phi.evaluations;
    }
    result.step = p.alpha;
    result.success = true;
    result.evaluations = phi.evaluations;
    return result;
  };

  auto fallback = [&]() {
    if (phi.has_best()) {
      result.strong_wolfe = std::abs(phi.best().dphi) <= curvature_bound;
      return accept(phi.best());
    }
    result.evaluations = phi.evaluations;
    return result;  // failure
  };

  auto zoom = [&](Probe lo, Probe hi) {
    while (phi.evaluations < opts.max_linesearch_steps) {
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      Probe cur = phi(interpolate(lo, hi));
      if (!phi.armijo(cur) || cur.f >= lo.f) {
        hi = cur;
        continue;
      }
      if (std::abs(cur.dphi) <= curvature_bound) {
        result.strong_wolfe = true;
        return accept(cur);
      }
      if (cur.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = cur;
    }
    return fallback();
  };

  Probe prev{0.0, f0, dphi0};
  double alpha = 1.0;
  while (phi.evaluations < opts.max_linesearch_steps) {
    Probe cur = phi(alpha);
    if (!std::isfinite(cur.f)) {
      // Overflowed or left the domain: backtrack toward the last good point.
      alpha = 0.5 * (prev.alpha + alpha);
      continue;
    }
    if (!phi.armijo(cur) || (phi.evaluations > 1 && cur.f >= prev.f)) return zoom(prev, cur);
    if (std::abs(cur.dphi) <= curvature_bound) {
      result.strong_wolfe = true;
      return accept(cur);
    }
    if (cur.dphi >= 0.0) return zoom(cur, prev);
    prev = cur;
    if (alpha >= alpha_max) break;
    alpha = std::min(2.0 * alpha, alpha_max);
  }
  return fallback();
}

MinimizeResult minimize(const Objective& eval, std::vector<double> x0,
                        const LbfgsOptions& opts, const Monitor& monitor) {
  opts.validate();
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("minimize: empty parameter vector");

  MinimizeResult result;
  std::vector<double> g(n);
  double f = eval(x0, g);
  result.evaluations = 1;
  if (!std::isfinite(f) || !all_finite(g))
    throw std::invalid_argument("minimize: non-finite objective or gradient at x0");

  std::vector<double> x = std::move(x0);
  result.trace.push_back({0, f, inf_norm(g), 0.0, 0.0});

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;

  auto steepest = [&](std::vector<double>& d) {
    const double gn = norm2(g);
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / gn;
  };

  auto two_loop = [&](std::vector<double>& d) {
    d.assign(g.begin(), g.end());
    std::vector<double> coeff(history.size());
    for (std::size_t i = history.size(); i-- > 0;) {
      const Pair& p = history[i];
      coeff[i] = p.rho * dot(p.s, d);
      for (std::size_t j = 0; j < n; ++j) d[j] -= coeff[i] * p.y[j];
    }
    const Pair& newest = history.back();
    const double gamma = dot(newest.s, newest.y) / dot(newest.y, newest.y);
    for (double& v : d) v *= gamma;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const Pair& p = history[i];
      const double beta = p.rho * dot(p.y, d);
      for (std::size_t j = 0; j < n; ++j) d[j] += (coeff[i] - beta) * p.s[j];
    }
    for (double& v : d) v = -v;
  };

  if (result.trace.front().grad_inf_norm < opts.grad_tol) {
    result.status = LbfgsStatus::grad_converged;
    result.x = std::move(x);
    return result;
  }

  std::vector<double> d(n), x_new(n), g_new(n);
  result.status = LbfgsStatus::max_iters;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const auto tic = std::chrono::steady_clock::now();

    if (history.empty())
      steepest(d);
    else
      two_loop(d);
    if (!(dot(g, d) < 0.0)) {
      history.clear();
      steepest(d);
    }

    double f_new = f;
    LineSearchResult ls = line_search(eval, x, d, f, g, opts, x_new, f_new, g_new);
    if (!ls.success && !history.empty()) {
      history.clear();
      steepest(d);
      LineSearchResult retry = line_search(eval, x, d, f, g, opts, x_new, f_new, g_new);
      retry.evaluations += ls.evaluations;
      ls = retry;
    }
    result.evaluations += ls.evaluations;
    if (!ls.success) {
      result.status = LbfgsStatus::linesearch_failed;
      break;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = x_new[i] - x[i];
      p.y[i] = g_new[i] - g[i];
      sy += p.s[i] * p.y[i];
      ss += p.s[i] * p.s[i];
      yy += p.y[i] * p.y[i];
    }
    if (sy > 1e-10 * std::sqrt(ss) * std::sqrt(yy)) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }

    const double f_prev = f;
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;

    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tic).count();
    result.trace.push_back({iter, f, inf_norm(g), ls.step, elapsed});

    if (result.trace.back().grad_inf_norm < opts.grad_tol) {
      result.status = LbfgsStatus::grad_converged;
      break;
    }
    if (std::abs(f_prev - f) <= opts.rel_obj_tol * std::max(1.0, std::abs(f_prev))) {
      result.status = LbfgsStatus::obj_converged;
      break;
    }
    if (monitor && !monitor(result.trace.back(), x)) {
      result.status = LbfgsStatus::monitor_stop;
      break;
    }
  }

  result.x = std::move(x);
  return result;
}

}  // namespace fctn
