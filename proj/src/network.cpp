#include "anarchy/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "anarchy/error.hpp"

namespace anarchy {

namespace {

void check_identity(double lhs, double rhs, std::size_t link) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (std::abs(lhs - rhs) > 1e-12 * scale) {
    throw std::logic_error("aggregate identity violated at link " + std::to_string(link));
  }
}

}  // namespace

ParallelNetwork ParallelNetwork::normalize(std::span<const AffineLatency> raw_links) {
  if (raw_links.empty()) {
    throw DomainError(ErrorCode::empty_network, "a network needs at least one link");
  }
  for (std::size_t i = 0; i < raw_links.size(); ++i) {
    const auto& link = raw_links[i];
    if (!std::isfinite(link.a) || !std::isfinite(link.b)) {
      throw DomainError(ErrorCode::non_finite_coefficient,
                        "link " + std::to_string(i) + " has a non-finite coefficient");
    }
    if (link.a < 0.0 || link.b < 0.0) {
      throw DomainError(ErrorCode::negative_coefficient,
                        "link " + std::to_string(i) + " has a negative coefficient");
    }
  }

  std::vector<AffineLatency> sorted(raw_links.begin(), raw_links.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const AffineLatency& x, const AffineLatency& y) { return x.b < y.b; });

  // Links with equal offsets act as one link whose efficiency is the sum.
  std::vector<AffineLatency> merged;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t end = i;
    double efficiency = 0.0;
    bool constant = false;
    while (end < sorted.size() && sorted[end].b == sorted[i].b) {
      if (sorted[end].a == 0.0) {
        constant = true;
      } else {
        efficiency += 1.0 / sorted[end].a;
      }
      ++end;
    }
    if (end - i == 1) {
      merged.push_back(sorted[i]);
    } else {
      merged.push_back({constant ? 0.0 : 1.0 / efficiency, sorted[i].b});
    }
    i = end;
  }

  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    if (merged[i].a == 0.0) {
      throw DomainError(ErrorCode::zero_slope_not_last,
                        "only the link with the largest offset may have zero slope (link with b=" +
                            std::to_string(merged[i].b) + ")");
    }
  }
  return ParallelNetwork(std::move(merged));
}

ParallelNetwork::ParallelNetwork(std::vector<AffineLatency> sorted_links)
    : links_(std::move(sorted_links)) {
  const std::size_t k = links_.size();
  efficiency_sums_.assign(k + 1, 0.0);
  gamma_sums_.assign(k + 1, 0.0);
  breakpoints_.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    efficiency_sums_[i + 1] = efficiency_sums_[i] + links_[i].efficiency();
    gamma_sums_[i + 1] = gamma_sums_[i] + links_[i].gamma();
  }
  for (std::size_t i = 0; i < k; ++i) {
    double r = 0.0;
    for (std::size_t m = 0; m < i; ++m) r += (links_[i].b - links_[m].b) * links_[m].efficiency();
    breakpoints_[i] = r;
  }

  for (std::size_t i = 0; i < k; ++i) {
    const double b = links_[i].b;
    check_identity(gamma_sums_[i] + breakpoints_[i], b * efficiency_sums_[i], i);
    if (links_[i].a > 0.0) {
      check_identity(gamma_sums_[i + 1] + breakpoints_[i], b * efficiency_sums_[i + 1], i);
    }
  }
}

ParallelNetwork ParallelNetwork::suffix(std::size_t first) const {
  if (first >= links_.size()) throw std::out_of_range("suffix start past the last link");
  return ParallelNetwork(std::vector<AffineLatency>(links_.begin() + static_cast<std::ptrdiff_t>(first),
                                                    links_.end()));
}

}  // namespace anarchy
