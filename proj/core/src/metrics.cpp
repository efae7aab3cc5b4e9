#include "fctn/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fctn {

namespace {

constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

void check_same_dims(const DenseTensor& a, const DenseTensor& b, const char* what) {
  if (a.dims() != b.dims())
    throw std::invalid_argument(std::string(what) + ": tensor dims do not match");
}

double ssim_from_stats(double mean_x, double mean_y, double var_x, double var_y, double cov,
                       double c1, double c2) {
  const double num = (2.0 * mean_x * mean_y + c1) * (2.0 * cov + c2);
  const double den = (mean_x * mean_x + mean_y * mean_y + c1) * (var_x + var_y + c2);
  return num / den;
}

}  // namespace

double rel_error(const DenseTensor& truth, const DenseTensor& estimate) {
  check_same_dims(truth, estimate, "rel_error");
  double diff = 0.0, denom = 0.0;
  const double* t = truth.data();
  const double* x = estimate.data();
  for (std::int64_t i = 0; i < truth.size(); ++i) {
    const double d = t[i] - x[i];
    diff += d * d;
    denom += x[i] * x[i];
  }
  if (denom == 0.0)
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(diff) / std::sqrt(denom);
}

double mse(const DenseTensor& truth, const DenseTensor& estimate) {
  check_same_dims(truth, estimate, "mse");
  double sum = 0.0;
  const double* t = truth.data();
  const double* x = estimate.data();
  for (std::int64_t i = 0; i < truth.size(); ++i) {
    const double d = t[i] - x[i];
    sum += d * d;
  }
  return sum / static_cast<double>(truth.size());
}

double psnr(const DenseTensor& truth, const DenseTensor& estimate, double peak) {
  const double m = mse(truth, estimate);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

double psnr_table_value(double psnr_db) { return std::min(psnr_db, 99.0); }

std::vector<double> ssim_slices(const DenseTensor& truth, const DenseTensor& estimate,
                                double dynamic_range) {
  check_same_dims(truth, estimate, "ssim");
  if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");
  const double c1 = (kSsimK1 * dynamic_range) * (kSsimK1 * dynamic_range);
  const double c2 = (kSsimK2 * dynamic_range) * (kSsimK2 * dynamic_range);

  // Slice over the leading two modes: the trailing modes enumerate slices and
  // their combined size is also the element stride within one slice.
  const std::int64_t lead = truth.order() >= 2 ? truth.dims()[0] * truth.dims()[1]
                                               : truth.dims()[0];
  const std::int64_t slice_count = truth.size() / lead;

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(slice_count));
  const double* tv = truth.data();
  const double* xv = estimate.data();
  const double inv_n = 1.0 / static_cast<double>(lead);
  for (std::int64_t s = 0; s < slice_count; ++s) {
    double sum_x = 0.0, sum_y = 0.0;
    for (std::int64_t e = 0; e < lead; ++e) {
      sum_x += tv[e * slice_count + s];
      sum_y += xv[e * slice_count + s];
    }
    const double mean_x = sum_x * inv_n;
    const double mean_y = sum_y * inv_n;
    double var_x = 0.0, var_y = 0.0, cov = 0.0;
    for (std::int64_t e = 0; e < lead; ++e) {
      const double dx = tv[e * slice_count + s] - mean_x;
      const double dy = xv[e * slice_count + s] - mean_y;
      var_x += dx * dx;
      var_y += dy * dy;
      cov += dx * dy;
    }
    var_x *= inv_n;
    var_y *= inv_n;
    cov *= inv_n;
    out.push_back(ssim_from_stats(mean_x, mean_y, var_x, var_y, cov, c1, c2));
  }
  return out;
}

double ssim(const DenseTensor& truth, const DenseTensor& estimate, double dynamic_range) {
  const std::vector<double> slices = ssim_slices(truth, estimate, dynamic_range);
  double sum = 0.0;
  for (double v : slices) sum += v;
  return sum / static_cast<double>(slices.size());
}

MetricReport evaluate_metrics(const DenseTensor& truth, const DenseTensor& estimate, double peak,
                              double dynamic_range) {
  MetricReport report;
  report.rel_error = rel_error(truth, estimate);
  report.mse = mse(truth, estimate);
  report.psnr = report.mse == 0.0 ? std::numeric_limits<double>::infinity()
                                  : 10.0 * std::log10(peak * peak / report.mse);
  report.slice_ssim = ssim_slices(truth, estimate, dynamic_range);
  double sum = 0.0;
  for (double v : report.slice_ssim) sum += v;
  report.ssim = sum / static_cast<double>(report.slice_ssim.size());
  return report;
}

}  // namespace fctn
