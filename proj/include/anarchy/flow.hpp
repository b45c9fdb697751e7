#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anarchy/latency.hpp"
#include "anarchy/network.hpp"

namespace anarchy {

enum class LatencyFamily { original, modified };

// Per-link split of a total rate. Flows are non-negative and sum to the rate
// (relative tolerance 1e-9); the constructor throws std::invalid_argument
// otherwise.
class FlowProfile {
 public:
  FlowProfile(double rate, std::vector<double> flows,
              LatencyFamily family = LatencyFamily::original);

  double rate() const { return rate_; }
  std::span<const double> flows() const { return flows_; }
  double flow(std::size_t i) const { return flows_.at(i); }
  std::size_t size() const { return flows_.size(); }
  LatencyFamily family() const { return family_; }

  std::size_t used_count() const;

  // Sum of flow_i * latency_i(flow_i).
  double cost(const ParallelNetwork& net) const;
  double cost(std::span<const PiecewiseLatency> latencies) const;

  // Largest latency over the used links (the common level at equilibrium).
  double level(std::span<const PiecewiseLatency> latencies) const;

 private:
  double rate_;
  std::vector<double> flows_;
  LatencyFamily family_;
};

}  // namespace anarchy
