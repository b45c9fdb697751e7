#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "anarchy/flow.hpp"
#include "anarchy/latency.hpp"
#include "anarchy/network.hpp"

namespace anarchy {

// Range of flows a link may carry at the equilibrium level.
struct FlowInterval {
  double min = 0.0;
  double max = 0.0;
};

struct EquilibriumResult {
  FlowProfile profile;
  // Common latency of the used links. For an optimal flow this is the common
  // marginal cost 2*a*f + b instead.
  double level = 0.0;
  std::size_t used_count = 0;
  // Cost under the latencies the flow was solved for.
  double cost = 0.0;
  // Filled by water_fill only.
  std::vector<FlowInterval> intervals;
};

enum class FlowKind { nash, opt };

// Closed-form Wardrop flow. At r = breakpoint(j) the smaller link count is used.
EquilibriumResult nash_flow(const ParallelNetwork& net, double rate);

// Closed-form optimal flow; Opt opens link j at breakpoint(j) / 2.
EquilibriumResult opt_flow(const ParallelNetwork& net, double rate);

double nash_cost(const ParallelNetwork& net, double rate);
double opt_cost(const ParallelNetwork& net, double rate);

// C(rate) - C(start) for a flow that uses exactly `links` links on the whole
// closed segment [start, rate]. Throws SegmentMismatch otherwise.
double cost_increment(const ParallelNetwork& net, double start, double rate, std::size_t links,
                      FlowKind kind);

// Equilibrium for arbitrary non-decreasing lower semicontinuous latencies:
// bisects the level L* = inf{L : sum_i max_flow_i(L) >= rate} and spreads the
// rate inside the per-link intervals [min_flow_i(L*), max_flow_i(L*)].
// Throws InfeasibleRate when the caps cannot absorb the rate.
EquilibriumResult water_fill(std::span<const PiecewiseLatency> latencies, double rate,
                             LatencyFamily family = LatencyFamily::modified);

struct EquilibriumCheck {
  bool is_equilibrium = true;
  // Violating pair: the used link and the link it would rather move to.
  std::size_t from = 0;
  std::size_t to = 0;
  double from_latency = 0.0;
  double to_right_liminf = 0.0;

  explicit operator bool() const { return is_equilibrium; }
};

// User-equilibrium test: every used link i satisfies
// value_i(f_i) <= right_liminf_j(f_j) + tol * max(1, level) for all j != i.
EquilibriumCheck is_user_equilibrium(std::span<const PiecewiseLatency> latencies,
                                     const FlowProfile& profile, double tol = kDefaultTolerance);

struct WorstEquilibrium {
  double cost = 0.0;
  FlowProfile profile;
};

// Most expensive equilibrium split of two links. Throws TooManyLinks for any
// other link count.
WorstEquilibrium worst_equilibrium_two_links(std::span<const PiecewiseLatency> latencies, double rate,
                                             double tol = kDefaultTolerance);

inline double worst_equilibrium_cost_two_links(std::span<const PiecewiseLatency> latencies, double rate,
                                               double tol = kDefaultTolerance) {
  return worst_equilibrium_two_links(latencies, rate, tol).cost;
}

}  // namespace anarchy
