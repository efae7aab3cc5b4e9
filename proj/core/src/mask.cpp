#include "fctn/mask.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fctn {

ObservationMask gen_mask(std::vector<std::int64_t> dims, double rate, std::uint64_t seed) {
  if (!(rate > 0.0) || rate > 1.0)
    throw std::invalid_argument("gen_mask: sampling rate must be in (0, 1]");

  ObservationMask out;
  out.mask = DenseTensor(std::move(dims));
  out.rate = rate;
  out.seed = seed;
  out.algorithm = "mt19937_64/partial-fisher-yates";

  const std::int64_t total = out.mask.size();
  const std::int64_t count = std::llround(rate * static_cast<double>(total));
  out.observed_count = count;

  std::vector<std::int64_t> positions(static_cast<std::size_t>(total));
  std::iota(positions.begin(), positions.end(), std::int64_t{0});
  std::mt19937_64 rng(seed);
  for (std::int64_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::int64_t> pick(i, total - 1);
    std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(pick(rng))]);
    out.mask[positions[static_cast<std::size_t>(i)]] = 1.0;
  }
  return out;
}

}  // namespace fctn
