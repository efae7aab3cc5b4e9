#include "fctn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fctn {

namespace {

std::string dims_to_string(std::span<const std::int64_t> dims) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ",";
    os << dims[i];
  }
  os << ")";
  return os.str();
}

// A free mode of a partially contracted network: the physical leg of factor k
// is {k,k}; the bond between factors j < k is {j,k}.
struct ModeLabel {
  int a = 0, b = 0;
  bool operator==(const ModeLabel&) const = default;
};

std::vector<ModeLabel> factor_labels(int n, int k) {
  std::vector<ModeLabel> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    if (j < k)
      labels.push_back({j, k});
    else if (j == k)
      labels.push_back({k, k});
    else
      labels.push_back({k, j});
  }
  return labels;
}

struct Labeled {
  DenseTensor tensor;
  std::vector<ModeLabel> labels;
};

// Contracts two labeled tensors over all labels they share. Free modes keep
// their original relative order, left operand first.
Labeled contract_pair(const Labeled& left, const Labeled& right) {
  std::vector<int> shared_left, shared_right, free_left, free_right;
  for (int i = 0; i < static_cast<int>(left.labels.size()); ++i) {
    auto it = std::ranges::find(right.labels, left.labels[static_cast<std::size_t>(i)]);
    if (it != right.labels.end()) {
      shared_left.push_back(i);
      shared_right.push_back(static_cast<int>(it - right.labels.begin()));
    } else {
      free_left.push_back(i);
    }
  }
  for (int i = 0; i < static_cast<int>(right.labels.size()); ++i) {
    if (std::ranges::find(shared_right, i) == shared_right.end()) free_right.push_back(i);
  }

  std::vector<int> perm_left, perm_right;
  perm_left.reserve(left.labels.size());
  perm_right.reserve(right.labels.size());
  for (int i : free_left) perm_left.push_back(i + 1);
  for (int i : shared_left) perm_left.push_back(i + 1);
  for (int i : shared_right) perm_right.push_back(i + 1);
  for (int i : free_right) perm_right.push_back(i + 1);

  std::int64_t rows = 1, inner = 1, cols = 1;
  std::vector<std::int64_t> out_dims;
  Labeled out;
  for (int i : free_left) {
    rows *= left.tensor.dims()[static_cast<std::size_t>(i)];
    out_dims.push_back(left.tensor.dims()[static_cast<std::size_t>(i)]);
    out.labels.push_back(left.labels[static_cast<std::size_t>(i)]);
  }
  for (int i : shared_left) inner *= left.tensor.dims()[static_cast<std::size_t>(i)];
  for (int i : free_right) {
    cols *= right.tensor.dims()[static_cast<std::size_t>(i)];
    out_dims.push_back(right.tensor.dims()[static_cast<std::size_t>(i)]);
    out.labels.push_back(right.labels[static_cast<std::size_t>(i)]);
  }

  DenseTensor a = reshape(permute(left.tensor, perm_left), {rows, inner});
  DenseTensor b = reshape(permute(right.tensor, perm_right), {inner, cols});
  out.tensor = reshape(matmul(a, b), std::move(out_dims));
  return out;
}

// Permutes a fully contracted network so its free modes appear in the order
// `target` lists them.
DenseTensor to_canonical(const Labeled& net, const std::vector<ModeLabel>& target) {
  std::vector<int> perm;
  perm.reserve(target.size());
  for (const ModeLabel& want : target) {
    auto it = std::ranges::find(net.labels, want);
    if (it == net.labels.end())
      throw std::logic_error("fctn: contraction lost a free mode");
    perm.push_back(static_cast<int>(it - net.labels.begin()) + 1);
  }
  return permute(net.tensor, perm);
}

void require_valid(const FactorSet& fs, const char* what) {
  ValidationReport report = validate(fs);
  if (!report.ok()) {
    std::string msg = std::string(what) + ": invalid factor set";
    for (const std::string& p : report.problems) msg += "; " + p;
    throw std::invalid_argument(msg);
  }
}

}  // namespace

RankMatrix::RankMatrix(int order, std::vector<std::int64_t> values) : n(order), entries(std::move(values)) {
  if (n < 0 || static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != entries.size())
    throw std::invalid_argument("RankMatrix: entry count must be n*n");
}

RankMatrix RankMatrix::uniform(int order, std::int64_t bond) {
  RankMatrix r;
  r.n = order;
  r.entries.assign(static_cast<std::size_t>(order) * static_cast<std::size_t>(order), bond);
  return r;
}

RankMatrix RankMatrix::ring(int order, std::int64_t bond) {
  RankMatrix r = uniform(order, 1);
  for (int j = 1; j <= order; ++j) {
    int next = (j % order) + 1;
    if (next != j) r.set(j, next, bond);
  }
  return r;
}

bool RankMatrix::symmetric() const {
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k)
      if (at(j, k) != at(k, j)) return false;
  return true;
}

std::size_t RankMatrix::idx(int j, int k) const {
  if (j < 1 || j > n || k < 1 || k > n)
    throw std::out_of_range("RankMatrix: factor index out of range");
  return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(n) +
         static_cast<std::size_t>(k - 1);
}

std::vector<std::int64_t> factor_shape(std::span<const std::int64_t> dims,
                                       const RankMatrix& ranks, int k) {
  const int n = static_cast<int>(dims.size());
  if (k < 1 || k > n) throw std::invalid_argument("factor_shape: factor index out of range");
  std::vector<std::int64_t> shape;
  shape.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    if (j == k)
      shape.push_back(dims[static_cast<std::size_t>(j - 1)]);
    else
      shape.push_back(ranks.at(std::min(j, k), std::max(j, k)));
  }
  return shape;
}

std::int64_t FactorSet::param_count() const {
  std::int64_t total = 0;
  for (int k = 1; k <= order(); ++k)
    total += element_count(factor_shape(dims, ranks, k));
  return total;
}

ValidationReport validate(std::span<const std::int64_t> dims, const RankMatrix& ranks) {
  ValidationReport report;
  const int n = static_cast<int>(dims.size());
  if (n < 2) report.problems.push_back("network order must be >= 2");
  for (int i = 0; i < n; ++i)
    if (dims[static_cast<std::size_t>(i)] < 1)
      report.problems.push_back("physical dim " + std::to_string(i + 1) + " must be >= 1");
  if (ranks.n != n) {
    report.problems.push_back("rank matrix is " + std::to_string(ranks.n) + "x" +
                              std::to_string(ranks.n) + " but the network order is " +
                              std::to_string(n));
    return report;
  }
  if (!ranks.symmetric()) report.problems.push_back("rank matrix is not symmetric");
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k)
      if (ranks.at(j, k) < 1)
        report.problems.push_back("bond (" + std::to_string(j) + "," + std::to_string(k) +
                                  ") must be >= 1");
  return report;
}

ValidationReport validate(const FactorSet& fs) {
  ValidationReport report = validate(fs.dims, fs.ranks);
  if (!report.ok()) return report;
  const int n = fs.order();
  if (static_cast<int>(fs.factors.size()) != n) {
    report.problems.push_back("expected " + std::to_string(n) + " factors, got " +
                              std::to_string(fs.factors.size()));
    return report;
  }
  for (int k = 1; k <= n; ++k) {
    std::vector<std::int64_t> expected = factor_shape(fs.dims, fs.ranks, k);
    const auto& actual = fs.factors[static_cast<std::size_t>(k - 1)].dims();
    if (actual != expected)
      report.problems.push_back("factor " + std::to_string(k) + ": expected dims " +
                                dims_to_string(expected) + ", got " + dims_to_string(actual));
  }
  return report;
}

DenseTensor fctn_compose(const FactorSet& fs) {
  std::vector<int> order(static_cast<std::size_t>(fs.order()));
  std::iota(order.begin(), order.end(), 1);
  return fctn_compose(fs, order);
}

DenseTensor fctn_compose(const FactorSet& fs, std::span<const int> fold_order) {
  require_valid(fs, "fctn_compose");
  const int n = fs.order();
  if (static_cast<int>(fold_order.size()) != n)
    throw std::invalid_argument("fctn_compose: fold order must list every factor once");

  Labeled net{fs.factors[static_cast<std::size_t>(fold_order[0] - 1)],
              factor_labels(n, fold_order[0])};
  for (int i = 1; i < n; ++i) {
    const int k = fold_order[i];
    net = contract_pair(net, {fs.factors[static_cast<std::size_t>(k - 1)], factor_labels(n, k)});
  }

  std::vector<ModeLabel> canonical;
  canonical.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) canonical.push_back({k, k});
  return to_canonical(net, canonical);
}

CompositeExcluding compose_excluding(const FactorSet& fs, int t) {
  require_valid(fs, "compose_excluding");
  const int n = fs.order();
  if (t < 1 || t > n) throw std::invalid_argument("compose_excluding: t out of range");

  Labeled net;
  bool first = true;
  for (int k = 1; k <= n; ++k) {
    if (k == t) continue;
    Labeled g{fs.factors[static_cast<std::size_t>(k - 1)], factor_labels(n, k)};
    net = first ? std::move(g) : contract_pair(net, g);
    first = false;
  }

  std::vector<ModeLabel> canonical;
  canonical.reserve(2 * static_cast<std::size_t>(n - 1));
  for (int k = 1; k <= n; ++k) {
    if (k == t) continue;
    if (k < t) {
      canonical.push_back({k, k});
      canonical.push_back({k, t});
    } else {
      canonical.push_back({t, k});
      canonical.push_back({k, k});
    }
  }
  return CompositeExcluding{t, to_canonical(net, canonical)};
}

UnfoldSpec excluding_unfold_spec(int order, int t) {
  if (order < 2) throw std::invalid_argument("excluding_unfold_spec: order must be >= 2");
  if (t < 1 || t > order) throw std::invalid_argument("excluding_unfold_spec: t out of range");
  UnfoldSpec spec;
  for (int i = 1; i <= order - 1; ++i) {
    spec.row_modes.push_back(i < t ? 2 * i : 2 * i - 1);
    spec.col_modes.push_back(i < t ? 2 * i - 1 : 2 * i);
  }
  return spec;
}

DenseTensor unfold_excluding(const CompositeExcluding& m) {
  return generalized_unfold(m.tensor, excluding_unfold_spec(m.network_order(), m.excluded));
}

FactorSet init_factors(std::vector<std::int64_t> dims, RankMatrix ranks, std::uint64_t seed) {
  ValidationReport report = validate(dims, ranks);
  if (!report.ok())
    throw std::invalid_argument("init_factors: " + report.problems.front());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.1);

  FactorSet fs;
  fs.dims = std::move(dims);
  fs.ranks = std::move(ranks);
  const int n = fs.order();
  fs.factors.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    DenseTensor g(factor_shape(fs.dims, fs.ranks, k));
    for (double& v : g.values()) v = gauss(rng);
    fs.factors.push_back(std::move(g));
  }
  return fs;
}

FactorSet init_factors(std::vector<std::int64_t> dims, RankMatrix ranks, std::uint64_t seed,
                       const DenseTensor& observed, const DenseTensor& mask) {
  if (observed.dims() != dims || mask.dims() != dims)
    throw std::invalid_argument("init_factors: calibration data dims do not match");
  FactorSet fs = init_factors(std::move(dims), std::move(ranks), seed);

  const double target = frobenius_norm(hadamard(mask, observed));
  const double current = frobenius_norm(hadamard(mask, fctn_compose(fs)));
  if (current < 1e-12) return fs;

  const double scale = std::pow(target / current, 1.0 / fs.order());
  for (DenseTensor& g : fs.factors)
    for (double& v : g.values()) v *= scale;
  return fs;
}

}  // namespace fctn
