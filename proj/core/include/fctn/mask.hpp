#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fctn/tensor.hpp"

namespace fctn {

/// A 0/1 indicator tensor of observed entries together with how it was drawn.
struct ObservationMask {
  DenseTensor mask;
  double rate = 1.0;
  std::uint64_t seed = 0;
  std::int64_t observed_count = 0;
  std::string algorithm;  // PRNG + sampling scheme, recorded for reproducibility
};

/// Draws exactly round(rate * prod(dims)) observed positions uniformly without
/// replacement (partial Fisher-Yates over a seeded mt19937_64). Deterministic
/// for a fixed seed within one build. Throws std::invalid_argument unless
/// rate is in (0, 1].
ObservationMask gen_mask(std::vector<std::int64_t> dims, double rate, std::uint64_t seed);

}  // namespace fctn
