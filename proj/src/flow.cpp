#include "anarchy/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace anarchy {

FlowProfile::FlowProfile(double rate, std::vector<double> flows, LatencyFamily family)
    : rate_(rate), flows_(std::move(flows)), family_(family) {
  if (!(rate_ >= 0.0) || !std::isfinite(rate_)) throw std::invalid_argument("rate must be finite and >= 0");
  double total = 0.0;
  for (double f : flows_) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("flows must be finite and >= 0");
    total += f;
  }
  if (std::abs(total - rate_) > kDefaultTolerance * std::max(1.0, rate_)) {
    throw std::invalid_argument("flows do not sum to the rate");
  }
}

std::size_t FlowProfile::used_count() const {
  return static_cast<std::size_t>(std::count_if(flows_.begin(), flows_.end(), [](double f) { return f > 0.0; }));
}

double FlowProfile::cost(const ParallelNetwork& net) const {
  if (net.size() != flows_.size()) throw std::invalid_argument("profile and network sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < flows_.size(); ++i) total += saturating_product(flows_[i], net.link(i)(flows_[i]));
  return total;
}

double FlowProfile::cost(std::span<const PiecewiseLatency> latencies) const {
  if (latencies.size() != flows_.size()) throw std::invalid_argument("profile and latency counts differ");
  double total = 0.0;
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    total += saturating_product(flows_[i], latencies[i].value(flows_[i]));
  }
  return total;
}

double FlowProfile::level(std::span<const PiecewiseLatency> latencies) const {
  if (latencies.size() != flows_.size()) throw std::invalid_argument("profile and latency counts differ");
  double level = -kInfinity;
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    if (flows_[i] > 0.0) level = std::max(level, latencies[i].value(flows_[i]));
  }
  if (level == -kInfinity) {
    level = kInfinity;
    for (const auto& lat : latencies) level = std::min(level, lat.value(0.0));
  }
  return level;
}

}  // namespace anarchy
