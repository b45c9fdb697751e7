#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace anarchy {

struct BoundReport {
  std::string name;
  double value = 1.0;
  std::vector<double> inputs;
  std::string formula;
  // 4/3 - value, computed in extended precision where it matters.
  double gap_to_four_thirds = 0.0;
  bool below_four_thirds = false;
  // Balancing point of the lower bound.
  std::optional<double> x1;
  std::optional<double> r_star;
};

// max{1 + 1/R, (4 + 4R)/(4 + 3R)}; throws ParamTooSmall for R < 2.
BoundReport two_link_simple_bound(double R);

// 4P^2 / (3P^2 + 1) with P = prod (1 + R_i).
BoundReport benign_bound(std::span<const double> R);

// The downward recurrence over suffixes of R, with the empty suffix worth 1.
BoundReport recurrence_bound(std::span<const double> R);

// Parameters for k links chosen from the top down: each R_i is the smallest
// power of two keeping (1 + 1/R_i)^2 times the inner value halfway below 4/3.
// Supports k <= 6; beyond that the gap to 4/3 falls below 1e-800.
std::vector<double> greedy_recurrence_parameters(std::size_t k);

// Minimax over x1 in [1/2, 1] on the instance l1 = x, l2 = x/R + 1, capped at
// 1.2. Throws RatioOutOfRange unless 2 <= R <= 4.
BoundReport lower_bound_value(double R, std::size_t resolution = 2001);

}  // namespace anarchy
