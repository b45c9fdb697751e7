#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "anarchy/latency.hpp"
#include "anarchy/mechanisms.hpp"
#include "anarchy/network.hpp"

namespace anarchy {

struct Unmodified {};

// Arbitrary modified latencies. The numerator is the exact worst equilibrium
// for two links and the water-fill equilibrium otherwise; suprema are
// computed on a refined grid rather than from structural breakpoints.
struct CustomLatencies {
  std::vector<PiecewiseLatency> latencies;
};

using Modification = std::variant<Unmodified, ThresholdParams, PlateauParams, CustomLatencies>;

// Latencies the modified equilibrium is played on.
std::vector<PiecewiseLatency> modified_latencies(const ParallelNetwork& net, const Modification& mod);

// Worst modified-equilibrium cost, or the Nash cost when unmodified.
double modified_cost(const ParallelNetwork& net, const Modification& mod, double rate);

// Positive rates, ascending, where the numerator or the denominator changes formula.
std::vector<double> structural_breakpoints(const ParallelNetwork& net, const Modification& mod);

struct CurveSample {
  double r = 0.0;
  double cost_num = 0.0;
  double cost_den = 0.0;
  double ratio = 1.0;
  std::size_t regime = 0;  // index of the inter-breakpoint segment holding r
};

std::vector<CurveSample> ratio_curve(const ParallelNetwork& net, const Modification& mod,
                                     std::span<const double> rates);

CurveSample ratio_at(const ParallelNetwork& net, const Modification& mod, double rate);

struct RatioSup {
  double value = 1.0;
  double argmax = 0.0;          // +inf when the supremum is the tail limit
  bool is_right_limit = false;  // approached from the right of argmax, not attained
};

RatioSup ratio_sup(const ParallelNetwork& net, const Modification& mod);

// lim of the ratio as r grows without bound.
double tail_limit(const ParallelNetwork& net, const Modification& mod);

struct ContinuityCheck {
  bool holds = true;
  double modified_cost = 0.0;
  double nash_cost = 0.0;

  explicit operator bool() const { return holds; }
};

// Modified cost at a continuous modified equilibrium never undercuts the
// original Nash cost. Throws NotContinuousAtEquilibrium when the modified
// latencies jump (or hit a cap) at the equilibrium flow.
ContinuityCheck continuity_no_improvement_check(const ParallelNetwork& net,
                                                std::span<const PiecewiseLatency> modified, double rate,
                                                double tol = 1e-9);

}  // namespace anarchy
