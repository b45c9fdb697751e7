#pragma once

#include <cstddef>
#include <random>

#include "anarchy/network.hpp"

namespace anarchy {

// Uniform draw on [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// k links with a in (0, 10] and b in [0, 10].
ParallelNetwork random_network(std::mt19937_64& rng, std::size_t k);

// Two links l1 = x, l2 = x/R + 1 (so r2 = 1 and a1/a2 = R).
ParallelNetwork normalized_two_link(double R);

}  // namespace anarchy
