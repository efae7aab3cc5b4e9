#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace fctn {

/// Dense tensor of 64-bit reals with explicit mode sizes.
///
/// Storage is a flat row-major buffer: the last mode varies fastest, so a
/// multi-index (i_1,...,i_N) maps to offset i_1*S_1 + ... + i_N*S_N with
/// S_N = 1 and S_k = S_{k+1} * dim_{k+1}. Mode indices in the public API are
/// 1-based (mode 1 is the slowest); element multi-indices are 0-based.
///
/// Values are immutable in all free-function operations below: each returns a
/// fresh tensor, so instances can be shared read-only across threads.
class DenseTensor {
public:
  /// Order-0 scalar holding one zero.
  DenseTensor() : DenseTensor(std::vector<std::int64_t>{}) {}

  /// Zero-filled tensor. Throws std::invalid_argument if any dim < 1.
  explicit DenseTensor(std::vector<std::int64_t> dims);

  /// Takes ownership of a flat value buffer; values.size() must equal the
  /// product of dims.
  DenseTensor(std::vector<std::int64_t> dims, std::vector<double> values);

  int order() const { return static_cast<int>(dims_.size()); }
  const std::vector<std::int64_t>& dims() const { return dims_; }
  const std::vector<std::int64_t>& strides() const { return strides_; }
  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const double* data() const { return values_.data(); }
  double* data() { return values_.data(); }

  double operator[](std::int64_t flat) const { return values_[flat]; }
  double& operator[](std::int64_t flat) { return values_[flat]; }

  /// Element access by 0-based multi-index.
  double at(std::span<const std::int64_t> index) const { return values_[offset_of(index)]; }
  double& at(std::span<const std::int64_t> index) { return values_[offset_of(index)]; }
  double at(std::initializer_list<std::int64_t> index) const {
    return at(std::span<const std::int64_t>(index.begin(), index.size()));
  }
  double& at(std::initializer_list<std::int64_t> index) {
    return at(std::span<const std::int64_t>(index.begin(), index.size()));
  }

  /// Row-major offset of a 0-based multi-index; throws if out of range.
  std::int64_t offset_of(std::span<const std::int64_t> index) const;

  /// Inverse of offset_of.
  std::vector<std::int64_t> index_of(std::int64_t offset) const;

  static DenseTensor zeros(std::vector<std::int64_t> dims) { return DenseTensor(std::move(dims)); }
  static DenseTensor ones(std::vector<std::int64_t> dims);
  static DenseTensor constant(std::vector<std::int64_t> dims, double value);

  bool operator==(const DenseTensor& other) const = default;

private:
  std::vector<std::int64_t> dims_;
  std::vector<std::int64_t> strides_;
  std::vector<double> values_;
};

/// A partition of the modes {1..N} into an ordered row group and an ordered
/// column group, driving generalized_unfold / generalized_fold. Within each
/// group the first listed mode is the slowest (row-major decoding).
struct UnfoldSpec {
  std::vector<int> row_modes;  // 1-based
  std::vector<int> col_modes;  // 1-based

  /// Throws std::invalid_argument unless the two groups form an exact
  /// partition of {1..order}.
  void validate(int order) const;
};

/// Number of elements; 1 for an empty dim list.
std::int64_t element_count(std::span<const std::int64_t> dims);

/// Matricization by mode partition: entry (r, c) is the element whose
/// multi-index is obtained by row-major decoding r over spec.row_modes and c
/// over spec.col_modes. Returns an order-2 tensor of shape
/// (prod row dims) x (prod col dims).
DenseTensor generalized_unfold(const DenseTensor& x, const UnfoldSpec& spec);

/// Exact inverse of generalized_unfold: rebuilds a tensor of shape `dims`
/// from its matricization.
DenseTensor generalized_fold(const DenseTensor& m, const UnfoldSpec& spec,
                             std::vector<std::int64_t> dims);

/// Classical mode-k unfolding: rows indexed by mode k, columns by the
/// remaining modes in ascending order. Equivalent to generalized_unfold with
/// row_modes = {k}.
DenseTensor mode_unfold(const DenseTensor& x, int mode);

/// Inverse of mode_unfold.
DenseTensor mode_fold(const DenseTensor& m, int mode, std::vector<std::int64_t> dims);

/// The UnfoldSpec mode_unfold uses, exposed so callers can fold back.
UnfoldSpec mode_unfold_spec(int order, int mode);

/// Elementwise product; dims must match.
DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);

/// sqrt of the sum of squared entries.
double frobenius_norm(const DenseTensor& x);

/// Reorders modes: result mode i is input mode order[i] (1-based), so
/// result.dims()[i] == x.dims()[order[i]-1].
DenseTensor permute(const DenseTensor& x, std::span<const int> order);
DenseTensor permute(const DenseTensor& x, std::initializer_list<int> order);

/// Row-major reinterpretation with a new shape; element count must match.
DenseTensor reshape(const DenseTensor& x, std::vector<std::int64_t> new_dims);

/// Matrix product of two order-2 tensors.
DenseTensor matmul(const DenseTensor& a, const DenseTensor& b);

/// a * transpose(b) without materializing the transpose.
DenseTensor matmul_nt(const DenseTensor& a, const DenseTensor& b);

}  // namespace fctn
