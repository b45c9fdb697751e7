#include "anarchy/sampling.hpp"

#include <vector>

namespace anarchy {

ParallelNetwork random_network(std::mt19937_64& rng, std::size_t k) {
  std::vector<AffineLatency> links;
  links.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = 10.0 - uniform(rng, 0.0, 10.0);
    const double b = uniform(rng, 0.0, 10.0);
    links.push_back(AffineLatency{a, b});
  }
  return normalize_network(links);
}

ParallelNetwork normalized_two_link(double R) {
  const AffineLatency links[] = {{1.0, 0.0}, {1.0 / R, 1.0}};
  return normalize_network(links);
}

}  // namespace anarchy
