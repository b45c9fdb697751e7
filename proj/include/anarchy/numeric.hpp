#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace anarchy {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Default comparison tolerance (relative).
inline constexpr double kDefaultTolerance = 1e-9;

// |x - y| <= tol * max(1, |x|, |y|). Infinite values compare equal only to themselves.
inline bool approx_equal(double x, double y, double tol = kDefaultTolerance) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
}

// Strictly relative comparison, for quantities that may be far below 1.
inline bool approx_equal_rel(double x, double y, double tol = kDefaultTolerance) {
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

// flow * latency with the convention 0 * inf = 0 (an unused capped link costs nothing).
inline double saturating_product(double flow, double latency) {
  if (flow == 0.0) return 0.0;
  return flow * latency;
}

}  // namespace anarchy
