#include "anarchy/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "anarchy/error.hpp"

namespace anarchy {

namespace {

void require_rate(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw DomainError(ErrorCode::negative_rate, "rate must be finite and non-negative, got " + std::to_string(rate));
  }
}

// Number of links whose opening rate lies strictly below `rate`.
std::size_t links_open_below(const ParallelNetwork& net, double rate, double breakpoint_scale) {
  std::size_t n = 0;
  while (n < net.size() && net.breakpoint(n) * breakpoint_scale < rate) ++n;
  return n;
}

EquilibriumResult zero_flow(const ParallelNetwork& net) {
  return EquilibriumResult{FlowProfile(0.0, std::vector<double>(net.size(), 0.0)), net.link(0).b, 0, 0.0, {}};
}

// C_h: the pairwise sum over used links i < g of (b_g - b_i)^2 lambda_g lambda_i / (4 Lambda_h).
double opt_correction(const ParallelNetwork& net, std::size_t used) {
  double sum = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    for (std::size_t g = i + 1; g < used; ++g) {
      const double gap = net.link(g).b - net.link(i).b;
      sum += gap * gap * net.efficiency(g) * net.efficiency(i);
    }
  }
  return sum / (4.0 * net.efficiency_sum(used));
}

}  // namespace

EquilibriumResult nash_flow(const ParallelNetwork& net, double rate) {
  require_rate(rate);
  if (rate == 0.0) return zero_flow(net);

  const std::size_t k = net.size();
  const std::size_t used = links_open_below(net, rate, 1.0);
  std::vector<double> flows(k, 0.0);

  if (used == k && net.has_constant_last_link()) {
    // Every finite-slope link sits at the constant link's latency; the rest
    // of the demand goes to the constant link.
    const double level = net.link(k - 1).b;
    double assigned = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      flows[i] = (level - net.link(i).b) * net.efficiency(i);
      assigned += flows[i];
    }
    flows[k - 1] = std::max(0.0, rate - assigned);
    return EquilibriumResult{FlowProfile(rate, std::move(flows)), level, used, level * rate, {}};
  }

  // f_i = r lambda_i / Lambda_j + delta_i, written through the common level
  // L = (r + Gamma_j) / Lambda_j as f_i = lambda_i (L - b_i).
  const double lambda = net.efficiency_sum(used);
  const double gamma = net.gamma_sum(used);
  const double level = (rate + gamma) / lambda;
  for (std::size_t i = 0; i < used; ++i) flows[i] = std::max(0.0, net.efficiency(i) * (level - net.link(i).b));
  const double cost = (rate * rate + gamma * rate) / lambda;
  return EquilibriumResult{FlowProfile(rate, std::move(flows)), level, used, cost, {}};
}

EquilibriumResult opt_flow(const ParallelNetwork& net, double rate) {
  require_rate(rate);
  if (rate == 0.0) return zero_flow(net);

  const std::size_t k = net.size();
  const std::size_t used = links_open_below(net, rate, 0.5);
  std::vector<double> flows(k, 0.0);

  if (used == k && net.has_constant_last_link()) {
    const double marginal = net.link(k - 1).b;
    double assigned = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      flows[i] = 0.5 * (marginal - net.link(i).b) * net.efficiency(i);
      assigned += flows[i];
    }
    flows[k - 1] = std::max(0.0, rate - assigned);
    FlowProfile profile(rate, std::move(flows));
    const double cost = profile.cost(net);
    return EquilibriumResult{std::move(profile), marginal, used, cost, {}};
  }

  // Equal marginal cost M = 2 a_i f_i + b_i on the used links.
  const double lambda = net.efficiency_sum(used);
  const double gamma = net.gamma_sum(used);
  const double marginal = (2.0 * rate + gamma) / lambda;
  for (std::size_t i = 0; i < used; ++i) {
    flows[i] = std::max(0.0, 0.5 * net.efficiency(i) * (marginal - net.link(i).b));
  }
  const double cost = (rate * rate + gamma * rate) / lambda - opt_correction(net, used);
  return EquilibriumResult{FlowProfile(rate, std::move(flows)), marginal, used, cost, {}};
}

double nash_cost(const ParallelNetwork& net, double rate) { return nash_flow(net, rate).cost; }

double opt_cost(const ParallelNetwork& net, double rate) { return opt_flow(net, rate).cost; }

double cost_increment(const ParallelNetwork& net, double start, double rate, std::size_t links,
                      FlowKind kind) {
  require_rate(start);
  require_rate(rate);
  if (start > rate) throw DomainError(ErrorCode::segment_mismatch, "start rate exceeds end rate");
  if (links == 0 || links > net.size()) {
    throw DomainError(ErrorCode::segment_mismatch, "link count out of range");
  }
  const double scale = kind == FlowKind::nash ? 1.0 : 0.5;
  const double lo = net.breakpoint(links - 1) * scale;
  const double hi = links < net.size() ? net.breakpoint(links) * scale : kInfinity;
  const double slack = 1e-12 * std::max(1.0, rate);
  if (start < lo - slack || rate > hi + slack) {
    throw DomainError(ErrorCode::segment_mismatch,
                      "rates straddle a breakpoint for " + std::to_string(links) + " links");
  }
  const double delta = rate - start;
  if (links == net.size() && net.has_constant_last_link()) return net.link(links - 1).b * delta;
  return (delta * delta + (net.gamma_sum(links) + 2.0 * start) * delta) / net.efficiency_sum(links);
}

EquilibriumResult water_fill(std::span<const PiecewiseLatency> latencies, double rate, LatencyFamily family) {
  require_rate(rate);
  if (latencies.empty()) throw DomainError(ErrorCode::empty_network, "no latencies given");

  double total_cap = 0.0;
  for (const auto& lat : latencies) total_cap += lat.cap();
  if (total_cap < rate - 1e-12 * std::max(1.0, rate)) {
    throw DomainError(ErrorCode::infeasible_rate, "caps admit at most " + std::to_string(total_cap));
  }

  auto supply = [&](double level) {
    double total = 0.0;
    for (const auto& lat : latencies) total += lat.max_flow_at_level(level);
    return total;
  };

  double lo = kInfinity;
  for (const auto& lat : latencies) lo = std::min(lo, lat.value(0.0));

  double level = lo;
  if (rate > 0.0 && supply(lo) < rate) {
    double step = std::max(1.0, std::abs(lo));
    double hi = lo + step;
    for (int doubling = 0; supply(hi) < rate; ++doubling) {
      if (doubling > 2000) throw std::logic_error("water_fill: no level absorbs the rate");
      step *= 2.0;
      hi = lo + step;
    }
    for (int iteration = 0; iteration < 200; ++iteration) {
      const double mid = lo + 0.5 * (hi - lo);
      if (mid <= lo || mid >= hi) break;
      if (supply(mid) >= rate) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    level = hi;
  }

  const std::size_t k = latencies.size();
  std::vector<FlowInterval> intervals(k);
  double lower_total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    intervals[i].min = latencies[i].min_flow_at_level(level);
    intervals[i].max = std::max(intervals[i].min, latencies[i].max_flow_at_level(level));
    lower_total += intervals[i].min;
  }

  std::vector<double> flows(k, 0.0);
  if (rate > 0.0) {
    if (lower_total >= rate) {
      // Only rounding gets here. Trim links that reach the level continuously;
      // a link parked below a jump must keep its flow.
      const double excess = lower_total - rate;
      const double near = 1e-9 * std::max(1.0, std::abs(level));
      double trimmable = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (intervals[i].min > 0.0 && latencies[i].value(intervals[i].min) >= level - near) trimmable += intervals[i].min;
      }
      for (std::size_t i = 0; i < k; ++i) {
        const double m = intervals[i].min;
        if (trimmable > excess) {
          const bool trim = m > 0.0 && latencies[i].value(m) >= level - near;
          flows[i] = trim ? m - excess * (m / trimmable) : m;
        } else {
          flows[i] = m * (rate / lower_total);
        }
      }
    } else {
      const double deficit = rate - lower_total;
      std::size_t unbounded = 0;
      double width = 0.0;
      for (const auto& iv : intervals) {
        if (std::isinf(iv.max)) {
          ++unbounded;
        } else {
          width += iv.max - iv.min;
        }
      }
      for (std::size_t i = 0; i < k; ++i) {
        const auto& iv = intervals[i];
        if (unbounded > 0) {
          flows[i] = iv.min + (std::isinf(iv.max) ? deficit / static_cast<double>(unbounded) : 0.0);
        } else if (width > 0.0) {
          flows[i] = iv.min + (iv.max - iv.min) * std::min(1.0, deficit / width);
        } else {
          flows[i] = iv.min;
        }
      }
    }
  }

  FlowProfile profile(rate, std::move(flows), family);
  if (!is_user_equilibrium(latencies, profile)) {
    throw std::logic_error("water_fill: canonical profile is not an equilibrium (unreachable)");
  }
  const double cost = profile.cost(latencies);
  const std::size_t used = profile.used_count();
  return EquilibriumResult{std::move(profile), level, used, cost, std::move(intervals)};
}

EquilibriumCheck is_user_equilibrium(std::span<const PiecewiseLatency> latencies, const FlowProfile& profile,
                                     double tol) {
  if (latencies.size() != profile.size()) throw std::invalid_argument("profile and latency counts differ");
  const double level = profile.level(latencies);
  const double slack = tol * std::max(1.0, std::isfinite(level) ? std::abs(level) : 1.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile.flow(i) <= 0.0) continue;
    const double lhs = latencies[i].value(profile.flow(i));
    if (std::isinf(lhs)) return EquilibriumCheck{false, i, i, lhs, lhs};
    for (std::size_t j = 0; j < profile.size(); ++j) {
      if (j == i) continue;
      const double rhs = latencies[j].right_liminf(profile.flow(j));
      if (lhs > rhs + slack) return EquilibriumCheck{false, i, j, lhs, rhs};
    }
  }
  return EquilibriumCheck{};
}

WorstEquilibrium worst_equilibrium_two_links(std::span<const PiecewiseLatency> latencies, double rate,
                                             double tol) {
  if (latencies.size() != 2) {
    throw DomainError(ErrorCode::too_many_links, "the worst-equilibrium search handles exactly two links");
  }
  require_rate(rate);
  if (rate == 0.0) return WorstEquilibrium{0.0, FlowProfile(0.0, {0.0, 0.0}, LatencyFamily::modified)};

  const auto& first = latencies[0];
  const auto& second = latencies[1];
  const auto reference = water_fill(latencies, rate);

  // Candidate flows x on the first link.
  std::vector<double> candidates{0.0, rate, reference.profile.flow(0)};
  auto add = [&](double x) {
    if (x >= 0.0 && x <= rate) candidates.push_back(x);
  };
  for (double b : first.boundaries()) add(b);
  for (double b : second.boundaries()) add(rate - b);
  add(reference.intervals[0].min);
  add(reference.intervals[0].max);
  add(rate - reference.intervals[1].min);
  add(rate - reference.intervals[1].max);
  constexpr int kGrid = 10000;
  for (int g = 0; g <= kGrid; ++g) candidates.push_back(rate * g / kGrid);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Inside an open piece both latencies are affine, so an interior
  // equilibrium is either the crossing point or (both flat and equal) the
  // whole piece, for which the midpoint stands in.
  const std::size_t grid_size = candidates.size();
  for (std::size_t c = 0; c + 1 < grid_size; ++c) {
    const double p = candidates[c];
    const double q = candidates[c + 1];
    const double mid = 0.5 * (p + q);
    candidates.push_back(mid);
    if (mid > first.cap() || rate - mid > second.cap()) continue;
    const auto s1 = first.segments();
    const auto s2 = second.segments();
    const Segment& piece1 = *std::prev(std::upper_bound(s1.begin(), s1.end(), mid,
                                                        [](double v, const Segment& s) { return v < s.start; }));
    const Segment& piece2 = *std::prev(std::upper_bound(s2.begin(), s2.end(), rate - mid,
                                                        [](double v, const Segment& s) { return v < s.start; }));
    const double slopes = piece1.slope + piece2.slope;
    if (slopes > 0.0) {
      const double crossing = (piece2.offset + piece2.slope * rate - piece1.offset) / slopes;
      if (crossing > p && crossing < q) candidates.push_back(crossing);
    }
  }

  double best_cost = -kInfinity;
  double best_x = 0.0;
  for (double x : candidates) {
    const double y = std::max(0.0, rate - x);
    FlowProfile profile(rate, {x, y}, LatencyFamily::modified);
    if (!is_user_equilibrium(latencies, profile, tol)) continue;
    const double cost = profile.cost(latencies);
    if (cost > best_cost || (cost == best_cost && x < best_x)) {
      best_cost = cost;
      best_x = x;
    }
  }
  if (best_cost == -kInfinity) throw std::logic_error("worst_equilibrium_two_links: no equilibrium found");
  return WorstEquilibrium{best_cost, FlowProfile(rate, {best_x, std::max(0.0, rate - best_x)}, LatencyFamily::modified)};
}

}  // namespace anarchy
