#pragma once

#include <vector>

#include "fctn/tensor.hpp"

namespace fctn {

/// Evaluation summary for a recovered tensor against ground truth.
struct MetricReport {
  double rel_error = 0.0;
  double mse = 0.0;
  double psnr = 0.0;                   // decibels; +inf for identical inputs
  double ssim = 0.0;                   // in [-1, 1]
  std::vector<double> slice_ssim;      // one entry per leading-two-mode slice
};

/// ||truth - estimate||_F / ||estimate||_F; +inf when the estimate is zero.
double rel_error(const DenseTensor& truth, const DenseTensor& estimate);

/// Mean squared error: squared Frobenius norm of the difference over the
/// element count.
double mse(const DenseTensor& truth, const DenseTensor& estimate);

/// 10 log10(peak^2 / MSE); +inf for identical inputs.
double psnr(const DenseTensor& truth, const DenseTensor& estimate, double peak = 255.0);

/// Caps +inf (and anything above) at 99 dB for tabular output.
double psnr_table_value(double psnr_db);

/// Structural similarity from global slice statistics (single mean, variance
/// and covariance per slice, no sliding window), with stability constants
/// c1 = (0.01 L)^2 and c2 = (0.03 L)^2. Order-N inputs are compared slice by
/// slice over the leading two modes and the slice values averaged.
double ssim(const DenseTensor& truth, const DenseTensor& estimate, double dynamic_range = 255.0);

/// Per-slice SSIM values in slice iteration order (trailing indices fastest).
std::vector<double> ssim_slices(const DenseTensor& truth, const DenseTensor& estimate,
                                double dynamic_range = 255.0);

MetricReport evaluate_metrics(const DenseTensor& truth, const DenseTensor& estimate,
                              double peak = 255.0, double dynamic_range = 255.0);

}  // namespace fctn
