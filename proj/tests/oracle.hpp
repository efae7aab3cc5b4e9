// Independent reference implementations the tests check the library against.
// Everything here is written as literal element-by-element computation and
// must stay free of the contraction/unfold machinery it verifies.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "fctn/network.hpp"
#include "fctn/tensor.hpp"

namespace oracle {

inline fctn::DenseTensor random_tensor(std::vector<std::int64_t> dims, std::mt19937_64& rng,
                                       double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  fctn::DenseTensor t(std::move(dims));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

inline fctn::FactorSet random_factor_set(std::vector<std::int64_t> dims, fctn::RankMatrix ranks,
                                         std::mt19937_64& rng) {
  fctn::FactorSet fs;
  fs.dims = std::move(dims);
  fs.ranks = std::move(ranks);
  for (int k = 1; k <= fs.order(); ++k)
    fs.factors.push_back(random_tensor(fctn::factor_shape(fs.dims, fs.ranks, k), rng));
  return fs;
}

inline double max_abs_diff(const fctn::DenseTensor& a, const fctn::DenseTensor& b) {
  if (a.dims() != b.dims()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Row-major place-value decode of a flat index over the listed modes.
inline std::vector<std::int64_t> decode(std::int64_t flat, const std::vector<int>& modes,
                                        std::span<const std::int64_t> dims) {
  std::vector<std::int64_t> digits(modes.size());
  for (std::size_t i = modes.size(); i-- > 0;) {
    const std::int64_t d = dims[static_cast<std::size_t>(modes[i] - 1)];
    digits[i] = flat % d;
    flat /= d;
  }
  return digits;
}

// Matricization built entry by entry from the index map.
inline fctn::DenseTensor unfold_by_index_map(const fctn::DenseTensor& x,
                                             const fctn::UnfoldSpec& spec) {
  std::int64_t rows = 1, cols = 1;
  for (int m : spec.row_modes) rows *= x.dims()[static_cast<std::size_t>(m - 1)];
  for (int m : spec.col_modes) cols *= x.dims()[static_cast<std::size_t>(m - 1)];
  fctn::DenseTensor out({rows, cols});
  std::vector<std::int64_t> idx(static_cast<std::size_t>(x.order()));
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::vector<std::int64_t> rd = decode(r, spec.row_modes, x.dims());
    for (std::int64_t c = 0; c < cols; ++c) {
      const std::vector<std::int64_t> cd = decode(c, spec.col_modes, x.dims());
      for (std::size_t i = 0; i < spec.row_modes.size(); ++i)
        idx[static_cast<std::size_t>(spec.row_modes[i] - 1)] = rd[i];
      for (std::size_t i = 0; i < spec.col_modes.size(); ++i)
        idx[static_cast<std::size_t>(spec.col_modes[i] - 1)] = cd[i];
      out[r * cols + c] = x.at(idx);
    }
  }
  return out;
}

namespace detail {

struct BondTable {
  struct Bond {
    int j, k;
    std::int64_t size;
  };
  std::vector<Bond> bonds;

  explicit BondTable(const fctn::FactorSet& fs, int excluded = 0) {
    for (int j = 1; j <= fs.order(); ++j)
      for (int k = j + 1; k <= fs.order(); ++k)
        if (j != excluded && k != excluded) bonds.push_back({j, k, fs.ranks.at(j, k)});
  }

  std::size_t index_of(int j, int k) const {
    for (std::size_t i = 0; i < bonds.size(); ++i)
      if (bonds[i].j == std::min(j, k) && bonds[i].k == std::max(j, k)) return i;
    throw std::logic_error("oracle: bond not in table");
  }

  bool advance(std::vector<std::int64_t>& config) const {
    for (std::size_t i = bonds.size(); i-- > 0;) {
      if (++config[i] < bonds[i].size) return true;
      config[i] = 0;
    }
    return false;
  }
};

}  // namespace detail

// Literal multi-sum composition: for every output entry, sum the product of
// factor entries over every bond configuration.
inline fctn::DenseTensor compose_by_nested_sum(const fctn::FactorSet& fs) {
  const int n = fs.order();
  const detail::BondTable table(fs);
  fctn::DenseTensor out(fs.dims);
  for (std::int64_t off = 0; off < out.size(); ++off) {
    const std::vector<std::int64_t> phys = out.index_of(off);
    std::vector<std::int64_t> config(table.bonds.size(), 0);
    double sum = 0.0;
    do {
      double prod = 1.0;
      for (int k = 1; k <= n; ++k) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
        for (int j = 1; j <= n; ++j)
          idx[static_cast<std::size_t>(j - 1)] =
              (j == k) ? phys[static_cast<std::size_t>(k - 1)] : config[table.index_of(j, k)];
        prod *= fs.factors[static_cast<std::size_t>(k - 1)].at(idx);
      }
      sum += prod;
    } while (table.advance(config));
    out[off] = sum;
  }
  return out;
}

// Nested-sum contraction of all factors but t over the bonds not incident to
// t. Output modes: remaining factors ascending, (I_k, R_{k,t}) for k < t and
// (R_{t,k}, I_k) for k > t.
inline fctn::DenseTensor compose_excluding_by_nested_sum(const fctn::FactorSet& fs, int t) {
  const int n = fs.order();
  const detail::BondTable inner(fs, t);

  std::vector<std::int64_t> out_dims;
  for (int k = 1; k <= n; ++k) {
    if (k == t) continue;
    if (k < t) {
      out_dims.push_back(fs.dims[static_cast<std::size_t>(k - 1)]);
      out_dims.push_back(fs.ranks.at(k, t));
    } else {
      out_dims.push_back(fs.ranks.at(t, k));
      out_dims.push_back(fs.dims[static_cast<std::size_t>(k - 1)]);
    }
  }

  fctn::DenseTensor out(out_dims);
  for (std::int64_t off = 0; off < out.size(); ++off) {
    const std::vector<std::int64_t> oidx = out.index_of(off);
    // Split the output index into per-factor physical index and bond-to-t value.
    std::vector<std::int64_t> phys(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> bond_to_t(static_cast<std::size_t>(n), 0);
    std::size_t pos = 0;
    for (int k = 1; k <= n; ++k) {
      if (k == t) continue;
      if (k < t) {
        phys[static_cast<std::size_t>(k - 1)] = oidx[pos++];
        bond_to_t[static_cast<std::size_t>(k - 1)] = oidx[pos++];
      } else {
        bond_to_t[static_cast<std::size_t>(k - 1)] = oidx[pos++];
        phys[static_cast<std::size_t>(k - 1)] = oidx[pos++];
      }
    }

    std::vector<std::int64_t> config(inner.bonds.size(), 0);
    double sum = 0.0;
    do {
      double prod = 1.0;
      for (int k = 1; k <= n; ++k) {
        if (k == t) continue;
        std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
        for (int j = 1; j <= n; ++j) {
          if (j == k)
            idx[static_cast<std::size_t>(j - 1)] = phys[static_cast<std::size_t>(k - 1)];
          else if (j == t)
            idx[static_cast<std::size_t>(j - 1)] = bond_to_t[static_cast<std::size_t>(k - 1)];
          else
            idx[static_cast<std::size_t>(j - 1)] = config[inner.index_of(j, k)];
        }
        prod *= fs.factors[static_cast<std::size_t>(k - 1)].at(idx);
      }
      sum += prod;
    } while (inner.advance(config));
    out[off] = sum;
  }
  return out;
}

// Tensor-ring contraction from standalone cores, each of shape
// (left_rank, physical, right_rank), by the trace of the slice product.
inline fctn::DenseTensor tensor_ring_compose(const std::vector<fctn::DenseTensor>& cores) {
  const int n = static_cast<int>(cores.size());
  std::vector<std::int64_t> dims;
  for (const fctn::DenseTensor& c : cores) dims.push_back(c.dims()[1]);

  fctn::DenseTensor out(dims);
  for (std::int64_t off = 0; off < out.size(); ++off) {
    const std::vector<std::int64_t> idx = out.index_of(off);
    // Running product of the selected slices, as a flat row-major matrix.
    std::int64_t rows = cores[0].dims()[0];
    std::int64_t mid = cores[0].dims()[2];
    std::vector<double> acc(static_cast<std::size_t>(rows * mid));
    for (std::int64_t a = 0; a < rows; ++a)
      for (std::int64_t b = 0; b < mid; ++b)
        acc[static_cast<std::size_t>(a * mid + b)] = cores[0].at({a, idx[0], b});
    for (int k = 1; k < n; ++k) {
      const std::int64_t next = cores[static_cast<std::size_t>(k)].dims()[2];
      std::vector<double> prod(static_cast<std::size_t>(rows * next), 0.0);
      for (std::int64_t a = 0; a < rows; ++a)
        for (std::int64_t b = 0; b < mid; ++b)
          for (std::int64_t c = 0; c < next; ++c)
            prod[static_cast<std::size_t>(a * next + c)] +=
                acc[static_cast<std::size_t>(a * mid + b)] *
                cores[static_cast<std::size_t>(k)].at({b, idx[static_cast<std::size_t>(k)], c});
      acc = std::move(prod);
      mid = next;
    }
    double trace = 0.0;
    for (std::int64_t a = 0; a < rows; ++a) trace += acc[static_cast<std::size_t>(a * mid + a)];
    out[off] = trace;
  }
  return out;
}

// Embeds ring cores into the fully connected layout: bonds between
// ring-adjacent factors carry the core, every other bond is a singleton.
inline fctn::FactorSet embed_ring_cores(const std::vector<fctn::DenseTensor>& cores,
                                        std::int64_t bond) {
  const int n = static_cast<int>(cores.size());
  fctn::FactorSet fs;
  for (const fctn::DenseTensor& c : cores) fs.dims.push_back(c.dims()[1]);
  fs.ranks = fctn::RankMatrix::ring(n, bond);
  for (int k = 1; k <= n; ++k) {
    const int left_partner = k > 1 ? k - 1 : n;
    const int right_partner = k < n ? k + 1 : 1;
    fctn::DenseTensor g(fctn::factor_shape(fs.dims, fs.ranks, k));
    const fctn::DenseTensor& core = cores[static_cast<std::size_t>(k - 1)];
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t l = 0; l < core.dims()[0]; ++l)
      for (std::int64_t i = 0; i < core.dims()[1]; ++i)
        for (std::int64_t r = 0; r < core.dims()[2]; ++r) {
          idx.assign(static_cast<std::size_t>(n), 0);
          idx[static_cast<std::size_t>(left_partner - 1)] = l;
          idx[static_cast<std::size_t>(k - 1)] = i;
          idx[static_cast<std::size_t>(right_partner - 1)] = r;
          g.at(idx) = core.at({l, i, r});
        }
    fs.factors.push_back(std::move(g));
  }
  return fs;
}

// Central finite differences of a scalar function over a flat vector.
inline std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& f, std::vector<double> x,
    double step = 1e-6) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double fp = f(x);
    x[i] = saved - step;
    const double fm = f(x);
    x[i] = saved;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

}  // namespace oracle
