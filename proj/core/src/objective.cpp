#include "fctn/objective.hpp"

#include <algorithm>
#include <stdexcept>

namespace fctn {

Problem::Problem(DenseTensor observed_data, DenseTensor observation_mask, RankMatrix bond_ranks)
    : observed(std::move(observed_data)), mask(std::move(observation_mask)), ranks(std::move(bond_ranks)) {
  if (observed.dims() != mask.dims())
    throw std::invalid_argument("Problem: observed and mask dims do not match");
  for (double w : mask.values())
    if (w != 0.0 && w != 1.0)
      throw std::invalid_argument("Problem: mask entries must be exactly 0 or 1");
  ValidationReport report = validate(observed.dims(), ranks);
  if (!report.ok()) throw std::invalid_argument("Problem: " + report.problems.front());

  // Normalize: unobserved entries of the data tensor are forced to zero.
  double* t = observed.data();
  const double* w = mask.data();
  for (std::int64_t i = 0; i < observed.size(); ++i)
    if (w[i] == 0.0) t[i] = 0.0;
}

std::int64_t Problem::observed_count() const {
  std::int64_t count = 0;
  for (double w : mask.values()) count += (w == 1.0);
  return count;
}

FactorLayout FactorLayout::of(std::span<const std::int64_t> dims, const RankMatrix& ranks) {
  FactorLayout layout;
  layout.dims.assign(dims.begin(), dims.end());
  layout.ranks = ranks;
  const int n = static_cast<int>(dims.size());
  for (int k = 1; k <= n; ++k) {
    layout.shapes.push_back(factor_shape(dims, ranks, k));
    layout.offsets.push_back(layout.total);
    layout.total += element_count(layout.shapes.back());
  }
  return layout;
}

double loss(const Problem& p, const FactorSet& fs) {
  if (fs.dims != p.observed.dims())
    throw std::invalid_argument("loss: factor set dims do not match the problem");
  const DenseTensor composed = fctn_compose(fs);
  const double* t = p.observed.data();
  const double* w = p.mask.data();
  const double* x = composed.data();
  double sum = 0.0;
  for (std::int64_t i = 0; i < composed.size(); ++i) {
    const double r = w[i] * (t[i] - x[i]);
    sum += r * r;
  }
  return 0.5 * sum;
}

DenseTensor grad_factor(const Problem& p, const FactorSet& fs, int t) {
  if (fs.dims != p.observed.dims())
    throw std::invalid_argument("grad_factor: factor set dims do not match the problem");
  const int n = fs.order();
  if (t < 1 || t > n) throw std::invalid_argument("grad_factor: t out of range");

  const DenseTensor m = unfold_excluding(compose_excluding(fs, t));
  const DenseTensor g_t = mode_unfold(fs.factors[static_cast<std::size_t>(t - 1)], t);

  // residual = W_(t) o (G_(t) M - T_(t)), masked before the right product
  DenseTensor residual = matmul(g_t, m);
  {
    const DenseTensor t_unf = mode_unfold(p.observed, t);
    const DenseTensor w_unf = mode_unfold(p.mask, t);
    double* r = residual.data();
    const double* tv = t_unf.data();
    const double* wv = w_unf.data();
    for (std::int64_t i = 0; i < residual.size(); ++i) r[i] = wv[i] * (r[i] - tv[i]);
  }

  DenseTensor grad = matmul_nt(residual, m);
  return mode_fold(grad, t, factor_shape(fs.dims, fs.ranks, t));
}

ParamVector full_gradient(const Problem& p, const FactorSet& fs) {
  ParamVector g;
  g.layout = FactorLayout::of(fs.dims, fs.ranks);
  g.values.reserve(static_cast<std::size_t>(g.layout.total));
  for (int t = 1; t <= fs.order(); ++t) {
    const DenseTensor gt = grad_factor(p, fs, t);
    g.values.insert(g.values.end(), gt.values().begin(), gt.values().end());
  }
  return g;
}

ParamVector pack(const FactorSet& fs) {
  ParamVector v;
  v.layout = FactorLayout::of(fs.dims, fs.ranks);
  v.values.reserve(static_cast<std::size_t>(v.layout.total));
  for (const DenseTensor& g : fs.factors)
    v.values.insert(v.values.end(), g.values().begin(), g.values().end());
  if (static_cast<std::int64_t>(v.values.size()) != v.layout.total)
    throw std::invalid_argument("pack: factor set does not match its layout");
  return v;
}

FactorSet unpack(const ParamVector& v) { return unpack(v.values, v.layout); }

FactorSet unpack(std::span<const double> values, const FactorLayout& layout) {
  if (static_cast<std::int64_t>(values.size()) != layout.total)
    throw std::invalid_argument("unpack: value count does not match layout");
  FactorSet fs;
  fs.dims = layout.dims;
  fs.ranks = layout.ranks;
  fs.factors.reserve(layout.shapes.size());
  for (std::size_t k = 0; k < layout.shapes.size(); ++k) {
    const std::int64_t begin = layout.offsets[k];
    const std::int64_t count = element_count(layout.shapes[k]);
    fs.factors.emplace_back(layout.shapes[k],
                            std::vector<double>(values.begin() + begin, values.begin() + begin + count));
  }
  return fs;
}

}  // namespace fctn
