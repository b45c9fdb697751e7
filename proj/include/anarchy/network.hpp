#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anarchy/numeric.hpp"

namespace anarchy {

// Original cost of one link, l(x) = a*x + b.
struct AffineLatency {
  double a = 0.0;
  double b = 0.0;

  double operator()(double x) const { return a * x + b; }

  // lambda = 1/a; infinite for a constant link.
  double efficiency() const { return a > 0.0 ? 1.0 / a : kInfinity; }
  // gamma = b/a; infinite for a constant link.
  double gamma() const { return a > 0.0 ? b / a : kInfinity; }

  friend bool operator==(const AffineLatency&, const AffineLatency&) = default;
};

// k parallel links sorted by strictly increasing offset b, with the prefix
// aggregates every closed form needs. Only the last link may have a = 0.
//
// Indices are 0-based. efficiency_sum(n) and gamma_sum(n) aggregate the first
// n links; breakpoint(i) is the rate at which a Nash flow starts using link i
// (Opt starts it at half that rate).
class ParallelNetwork {
 public:
  // Sorts by b, merges equal-b links by adding efficiencies, validates, and
  // precomputes aggregates. Throws DomainError (EmptyNetwork,
  // NegativeCoefficient, NonFiniteCoefficient, ZeroSlopeNotLast).
  static ParallelNetwork normalize(std::span<const AffineLatency> raw_links);

  std::size_t size() const { return links_.size(); }
  std::span<const AffineLatency> links() const { return links_; }
  const AffineLatency& link(std::size_t i) const { return links_.at(i); }

  double efficiency(std::size_t i) const { return links_.at(i).efficiency(); }
  double gamma(std::size_t i) const { return links_.at(i).gamma(); }

  double efficiency_sum(std::size_t n) const { return efficiency_sums_.at(n); }
  double gamma_sum(std::size_t n) const { return gamma_sums_.at(n); }
  double breakpoint(std::size_t i) const { return breakpoints_.at(i); }

  // True when the last link has zero slope (constant latency b_k).
  bool has_constant_last_link() const { return links_.back().a == 0.0; }

  // The links first..k-1 as a standalone (already normalized) network.
  ParallelNetwork suffix(std::size_t first) const;

  friend bool operator==(const ParallelNetwork& x, const ParallelNetwork& y) {
    return x.links_ == y.links_;
  }

 private:
  explicit ParallelNetwork(std::vector<AffineLatency> sorted_links);

  std::vector<AffineLatency> links_;
  std::vector<double> efficiency_sums_;  // size k+1, [0] = 0
  std::vector<double> gamma_sums_;       // size k+1, [0] = 0
  std::vector<double> breakpoints_;      // size k, [0] = 0
};

inline ParallelNetwork normalize_network(std::span<const AffineLatency> raw_links) {
  return ParallelNetwork::normalize(raw_links);
}

}  // namespace anarchy
