#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fctn/network.hpp"
#include "fctn/tensor.hpp"

namespace fctn {

/// A masked completion problem: observed data, its 0/1 observation mask, and
/// the bond dimensions of the network to fit. Entries of the data tensor at
/// unobserved positions are zeroed on construction so garbage there can never
/// reach the loss or gradient.
struct Problem {
  DenseTensor observed;
  DenseTensor mask;
  RankMatrix ranks;

  /// Throws std::invalid_argument on dim mismatch or mask entries outside {0,1}.
  Problem(DenseTensor observed_data, DenseTensor observation_mask, RankMatrix bond_ranks);

  std::int64_t observed_count() const;
};

/// Fixed unpacking recipe for a flat parameter vector: factor shapes in factor
/// order, row-major within each factor.
struct FactorLayout {
  std::vector<std::int64_t> dims;
  RankMatrix ranks;
  std::vector<std::vector<std::int64_t>> shapes;
  std::vector<std::int64_t> offsets;  // start of each factor in the flat vector
  std::int64_t total = 0;

  static FactorLayout of(std::span<const std::int64_t> dims, const RankMatrix& ranks);
};

/// All factors flattened into one optimizer-facing vector.
struct ParamVector {
  std::vector<double> values;
  FactorLayout layout;
};

/// 1/2 * || mask o (observed - compose(fs)) ||_F^2
double loss(const Problem& p, const FactorSet& fs);

/// Analytic partial derivative of the loss with respect to factor t, shaped
/// like that factor. The mask is applied to the residual before the product
/// with the unfolded composite.
DenseTensor grad_factor(const Problem& p, const FactorSet& fs, int t);

/// grad_factor for t = 1..N concatenated in pack layout.
ParamVector full_gradient(const Problem& p, const FactorSet& fs);

ParamVector pack(const FactorSet& fs);
FactorSet unpack(const ParamVector& v);
FactorSet unpack(std::span<const double> values, const FactorLayout& layout);

}  // namespace fctn
