#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fctn/tensor.hpp"

namespace fctn {

/// Symmetric N x N matrix of bond dimensions: entry (j,k) is the size of the
/// mode shared by factors j and k. The diagonal is stored but never used.
struct RankMatrix {
  int n = 0;
  std::vector<std::int64_t> entries;  // n*n, row-major

  RankMatrix() = default;
  RankMatrix(int order, std::vector<std::int64_t> values);

  /// All off-diagonal bonds set to `bond`.
  static RankMatrix uniform(int order, std::int64_t bond);

  /// Tensor-ring pattern: bonds between ring-adjacent factors (j-k = +-1 mod
  /// N) are `bond`, every other bond is 1.
  static RankMatrix ring(int order, std::int64_t bond);

  std::int64_t at(int j, int k) const { return entries[idx(j, k)]; }

  /// Sets both (j,k) and (k,j).
  void set(int j, int k, std::int64_t value) {
    entries[idx(j, k)] = value;
    entries[idx(k, j)] = value;
  }

  bool symmetric() const;
  bool operator==(const RankMatrix&) const = default;

private:
  std::size_t idx(int j, int k) const;
};

/// Mode sizes of factor k: bonds to factors 1..k-1, then the physical mode
/// I_k, then bonds to factors k+1..N.
std::vector<std::int64_t> factor_shape(std::span<const std::int64_t> dims,
                                       const RankMatrix& ranks, int k);

/// An ordered set of N factors, one per physical mode, every pair sharing a
/// bond whose size the rank matrix fixes.
struct FactorSet {
  std::vector<DenseTensor> factors;
  std::vector<std::int64_t> dims;  // target physical mode sizes I_1..I_N
  RankMatrix ranks;

  int order() const { return static_cast<int>(dims.size()); }
  std::int64_t param_count() const;
};

/// Outcome of structural validation; empty problem list means valid.
struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Checks the rank matrix shape/symmetry/positivity against the physical dims.
ValidationReport validate(std::span<const std::int64_t> dims, const RankMatrix& ranks);

/// Additionally checks every factor's mode sizes against factor_shape.
/// Reports all mismatches; never throws on bad input.
ValidationReport validate(const FactorSet& fs);

/// Contracts the whole network into the order-N tensor it represents, folding
/// factors in left-to-right sequence (or in the given order). Throws
/// std::invalid_argument when validate(fs) fails.
DenseTensor fctn_compose(const FactorSet& fs);
DenseTensor fctn_compose(const FactorSet& fs, std::span<const int> fold_order);

/// The network contracted over every bond not touching factor t; bonds to t
/// and the remaining physical modes stay free. Modes are ordered by remaining
/// factor index k ascending, each contributing (I_k, R_{k,t}) when k < t and
/// (R_{t,k}, I_k) when k > t, giving order 2(N-1).
struct CompositeExcluding {
  int excluded = 0;  // t, 1-based
  DenseTensor tensor;

  int network_order() const { return tensor.order() / 2 + 1; }
};

CompositeExcluding compose_excluding(const FactorSet& fs, int t);

/// The mode partition under which unfold_excluding matricizes the composite:
/// row modes pick the bonds incident to t (ordered by partner index), column
/// modes pick the remaining physical modes ascending.
UnfoldSpec excluding_unfold_spec(int order, int t);

/// Matricizes a composite so that mode-t unfolding of the full composition
/// equals mode_unfold(G_t, t) * unfold_excluding(compose_excluding(fs, t)).
DenseTensor unfold_excluding(const CompositeExcluding& m);

/// Factors with i.i.d. N(0, 0.1^2) entries drawn from a seeded generator;
/// identical seeds give identical factor sets within one build.
FactorSet init_factors(std::vector<std::int64_t> dims, RankMatrix ranks, std::uint64_t seed);

/// As above, then rescales every factor by a common per-factor power so the
/// masked composition roughly matches the observed data's Frobenius norm
/// (skipped when the initial masked composition is numerically zero).
FactorSet init_factors(std::vector<std::int64_t> dims, RankMatrix ranks, std::uint64_t seed,
                       const DenseTensor& observed, const DenseTensor& mask);

}  // namespace fctn
