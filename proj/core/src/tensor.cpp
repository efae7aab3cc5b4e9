#include "fctn/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fctn {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<std::int64_t> row_major_strides(const std::vector<std::int64_t>& dims) {
  std::vector<std::int64_t> strides(dims.size());
  std::int64_t s = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    strides[i] = s;
    s *= dims[i];
  }
  return strides;
}

void check_dims(const std::vector<std::int64_t>& dims) {
  for (std::int64_t d : dims) {
    if (d < 1) throw std::invalid_argument("DenseTensor: every dim must be >= 1");
  }
}

void check_matrix(const DenseTensor& t, const char* what) {
  if (t.order() != 2)
    throw std::invalid_argument(std::string(what) + ": expected an order-2 tensor");
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::int64_t> dims)
    : dims_(std::move(dims)), strides_(row_major_strides(dims_)) {
  check_dims(dims_);
  values_.assign(static_cast<std::size_t>(element_count(dims_)), 0.0);
}

DenseTensor::DenseTensor(std::vector<std::int64_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), strides_(row_major_strides(dims_)), values_(std::move(values)) {
  check_dims(dims_);
  if (static_cast<std::int64_t>(values_.size()) != element_count(dims_))
    throw std::invalid_argument("DenseTensor: value count does not match dims");
}

std::int64_t DenseTensor::offset_of(std::span<const std::int64_t> index) const {
  if (static_cast<int>(index.size()) != order())
    throw std::invalid_argument("DenseTensor: multi-index length does not match order");
  std::int64_t off = 0;
  for (int i = 0; i < order(); ++i) {
    if (index[i] < 0 || index[i] >= dims_[i])
      throw std::out_of_range("DenseTensor: index out of range in mode " + std::to_string(i + 1));
    off += index[i] * strides_[i];
  }
  return off;
}

std::vector<std::int64_t> DenseTensor::index_of(std::int64_t offset) const {
  if (offset < 0 || offset >= size())
    throw std::out_of_range("DenseTensor: flat offset out of range");
  std::vector<std::int64_t> idx(order());
  for (int i = 0; i < order(); ++i) {
    idx[i] = offset / strides_[i];
    offset %= strides_[i];
  }
  return idx;
}

DenseTensor DenseTensor::ones(std::vector<std::int64_t> dims) {
  return constant(std::move(dims), 1.0);
}

DenseTensor DenseTensor::constant(std::vector<std::int64_t> dims, double value) {
  DenseTensor t(std::move(dims));
  std::ranges::fill(t.values_, value);
  return t;
}

std::int64_t element_count(std::span<const std::int64_t> dims) {
  std::int64_t n = 1;
  for (std::int64_t d : dims) n *= d;
  return n;
}

void UnfoldSpec::validate(int order) const {
  if (static_cast<int>(row_modes.size() + col_modes.size()) != order)
    throw std::invalid_argument("UnfoldSpec: mode groups do not cover the tensor order");
  std::vector<char> seen(static_cast<std::size_t>(order), 0);
  auto mark = [&](int m) {
    if (m < 1 || m > order)
      throw std::invalid_argument("UnfoldSpec: mode " + std::to_string(m) + " out of range");
    if (seen[static_cast<std::size_t>(m - 1)])
      throw std::invalid_argument("UnfoldSpec: mode " + std::to_string(m) + " listed twice");
    seen[static_cast<std::size_t>(m - 1)] = 1;
  };
  for (int m : row_modes) mark(m);
  for (int m : col_modes) mark(m);
}

DenseTensor generalized_unfold(const DenseTensor& x, const UnfoldSpec& spec) {
  spec.validate(x.order());
  std::vector<int> order;
  order.reserve(x.order());
  order.insert(order.end(), spec.row_modes.begin(), spec.row_modes.end());
  order.insert(order.end(), spec.col_modes.begin(), spec.col_modes.end());
  DenseTensor p = permute(x, order);

  std::int64_t rows = 1, cols = 1;
  for (int m : spec.row_modes) rows *= x.dims()[m - 1];
  for (int m : spec.col_modes) cols *= x.dims()[m - 1];
  return reshape(p, {rows, cols});
}

DenseTensor generalized_fold(const DenseTensor& m, const UnfoldSpec& spec,
                             std::vector<std::int64_t> dims) {
  spec.validate(static_cast<int>(dims.size()));
  check_matrix(m, "generalized_fold");

  std::vector<std::int64_t> permuted_dims;
  permuted_dims.reserve(dims.size());
  for (int mode : spec.row_modes) permuted_dims.push_back(dims[mode - 1]);
  for (int mode : spec.col_modes) permuted_dims.push_back(dims[mode - 1]);
  if (element_count(permuted_dims) != m.size())
    throw std::invalid_argument("generalized_fold: matrix size does not match target dims");

  // Invert the unfold permutation: mode order[i] of the target came from
  // permuted mode i.
  std::vector<int> inverse(dims.size());
  int pos = 0;
  for (int mode : spec.row_modes) inverse[static_cast<std::size_t>(mode - 1)] = ++pos;
  for (int mode : spec.col_modes) inverse[static_cast<std::size_t>(mode - 1)] = ++pos;

  return permute(reshape(m, std::move(permuted_dims)), inverse);
}

UnfoldSpec mode_unfold_spec(int order, int mode) {
  if (mode < 1 || mode > order)
    throw std::invalid_argument("mode_unfold: mode " + std::to_string(mode) +
                                " out of range for order " + std::to_string(order));
  UnfoldSpec spec;
  spec.row_modes = {mode};
  for (int m = 1; m <= order; ++m)
    if (m != mode) spec.col_modes.push_back(m);
  return spec;
}

DenseTensor mode_unfold(const DenseTensor& x, int mode) {
  return generalized_unfold(x, mode_unfold_spec(x.order(), mode));
}

DenseTensor mode_fold(const DenseTensor& m, int mode, std::vector<std::int64_t> dims) {
  UnfoldSpec spec = mode_unfold_spec(static_cast<int>(dims.size()), mode);
  return generalized_fold(m, spec, std::move(dims));
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
  if (a.dims() != b.dims())
    throw std::invalid_argument("hadamard: operand dims do not match");
  std::vector<double> out(a.values().begin(), a.values().end());
  const double* bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return DenseTensor(a.dims(), std::move(out));
}

double frobenius_norm(const DenseTensor& x) {
  double sum = 0.0;
  for (double v : x.values()) sum += v * v;
  return std::sqrt(sum);
}

DenseTensor permute(const DenseTensor& x, std::span<const int> order) {
  const int n = x.order();
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("permute: order length does not match tensor order");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int m : order) {
    if (m < 1 || m > n || seen[static_cast<std::size_t>(m - 1)])
      throw std::invalid_argument("permute: not a permutation of 1..N");
    seen[static_cast<std::size_t>(m - 1)] = 1;
  }

  std::vector<std::int64_t> out_dims(static_cast<std::size_t>(n));
  std::vector<std::int64_t> src_stride(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out_dims[static_cast<std::size_t>(i)] = x.dims()[order[i] - 1];
    src_stride[static_cast<std::size_t>(i)] = x.strides()[order[i] - 1];
  }

  DenseTensor out(out_dims);
  const double* src = x.data();
  double* dst = out.data();
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
  std::int64_t src_off = 0;
  const std::int64_t total = out.size();
  for (std::int64_t o = 0; o < total; ++o) {
    dst[o] = src[src_off];
    for (int j = n - 1; j >= 0; --j) {
      ++idx[static_cast<std::size_t>(j)];
      src_off += src_stride[static_cast<std::size_t>(j)];
      if (idx[static_cast<std::size_t>(j)] < out_dims[static_cast<std::size_t>(j)]) break;
      src_off -= src_stride[static_cast<std::size_t>(j)] * out_dims[static_cast<std::size_t>(j)];
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
  return out;
}

DenseTensor permute(const DenseTensor& x, std::initializer_list<int> order) {
  return permute(x, std::span<const int>(order.begin(), order.size()));
}

DenseTensor reshape(const DenseTensor& x, std::vector<std::int64_t> new_dims) {
  check_dims(new_dims);
  if (element_count(new_dims) != x.size())
    throw std::invalid_argument("reshape: element count mismatch");
  return DenseTensor(std::move(new_dims), std::vector<double>(x.values().begin(), x.values().end()));
}

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) {
  check_matrix(a, "matmul");
  check_matrix(b, "matmul");
  if (a.dims()[1] != b.dims()[0])
    throw std::invalid_argument("matmul: inner dimensions do not match");
  DenseTensor out({a.dims()[0], b.dims()[1]});
  Eigen::Map<const RowMajorMatrix> A(a.data(), a.dims()[0], a.dims()[1]);
  Eigen::Map<const RowMajorMatrix> B(b.data(), b.dims()[0], b.dims()[1]);
  Eigen::Map<RowMajorMatrix> C(out.data(), out.dims()[0], out.dims()[1]);
  C.noalias() = A * B;
  return out;
}

DenseTensor matmul_nt(const DenseTensor& a, const DenseTensor& b) {
  check_matrix(a, "matmul_nt");
  check_matrix(b, "matmul_nt");
  if (a.dims()[1] != b.dims()[1])
    throw std::invalid_argument("matmul_nt: inner dimensions do not match");
  DenseTensor out({a.dims()[0], b.dims()[0]});
  Eigen::Map<const RowMajorMatrix> A(a.data(), a.dims()[0], a.dims()[1]);
  Eigen::Map<const RowMajorMatrix> B(b.data(), b.dims()[0], b.dims()[1]);
  Eigen::Map<RowMajorMatrix> C(out.data(), out.dims()[0], out.dims()[1]);
  C.noalias() = A * B.transpose();
  return out;
}

}  // namespace fctn
