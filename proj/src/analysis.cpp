#include "anarchy/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "anarchy/equilibrium.hpp"
#include "anarchy/error.hpp"

namespace anarchy {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void add_positive(std::vector<double>& out, double r) {
  if (std::isfinite(r) && r > 0.0) out.push_back(r);
}

void add_network_breakpoints(std::vector<double>& out, const ParallelNetwork& net, bool nash, bool opt) {
  for (std::size_t j = 1; j < net.size(); ++j) {
    if (nash) add_positive(out, net.breakpoint(j));
    if (opt) add_positive(out, 0.5 * net.breakpoint(j));
  }
}

double rate_scale(const ParallelNetwork& net) { return std::max(1.0, net.breakpoint(net.size() - 1)); }

// Quadratic through the samples at t = 1/4, 1/2, 3/4.
struct Quadratic {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;

  static Quadratic fit(double y1, double y2, double y3) {
    const double d = 2.0 * (y3 - y1);
    const double e = 8.0 * (y1 + y3 - 2.0 * y2);
    return Quadratic{y2 - 0.5 * d + 0.25 * e, d - e, e};
  }
  double at(double t) const { return c0 + t * (c1 + t * c2); }
};

// Roots of a t^2 + b t + c = 0 (linear and degenerate cases included).
std::vector<double> real_roots(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return {};
  a /= scale;
  b /= scale;
  c /= scale;
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) < 1e-14) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> roots;
  if (q != 0.0) roots.push_back(c / q);
  roots.push_back(q / a);
  return roots;
}

}  // namespace

std::vector<PiecewiseLatency> modified_latencies(const ParallelNetwork& net, const Modification& mod) {
  return std::visit(
      overloaded{
          [&](const Unmodified&) { return original_latencies(net); },
          [&](const ThresholdParams& p) {
            std::vector<PiecewiseLatency> out;
            for (std::size_t i = 0; i < net.size(); ++i) {
              out.push_back(PiecewiseLatency::affine(net.link(i), p.thresholds.at(i)));
            }
            return out;
          },
          [&](const PlateauParams& p) { return build_plateau_mechanism(net, p); },
          [&](const CustomLatencies& c) {
            if (c.latencies.size() != net.size()) throw std::invalid_argument("one latency per link expected");
            return c.latencies;
          },
      },
      mod);
}

double modified_cost(const ParallelNetwork& net, const Modification& mod, double rate) {
  return std::visit(
      overloaded{
          [&](const Unmodified&) { return nash_cost(net, rate); },
          // Frozen links never exceed their caps, so original latencies price them.
          [&](const ThresholdParams& p) { return mn_flow(net, p, rate).cost(net); },
          [&](const PlateauParams& p) {
            const auto lats = build_plateau_mechanism(net, p);
            return plateau_mn_flow(net, p, rate).cost(lats);
          },
          [&](const CustomLatencies& c) {
            if (c.latencies.size() == 2) return worst_equilibrium_cost_two_links(c.latencies, rate);
            return water_fill(c.latencies, rate).cost;
          },
      },
      mod);
}

std::vector<double> structural_breakpoints(const ParallelNetwork& net, const Modification& mod) {
  std::vector<double> out;
  std::visit(overloaded{
                 [&](const Unmodified&) { add_network_breakpoints(out, net, true, true); },
                 [&](const ThresholdParams& p) {
                   add_network_breakpoints(out, net, false, true);
                   for (double f : p.freeze_points) add_positive(out, f);
                   for (double s : mn_link_start_rates(net, p)) add_positive(out, s);
                 },
                 [&](const PlateauParams& p) {
                   if (plateau_is_identity(p)) {
                     add_network_breakpoints(out, net, true, true);
                     return;
                   }
                   add_network_breakpoints(out, net, true, true);
                   for (double r : {p.x1, p.r_star, p.r_star2}) add_positive(out, r);
                 },
                 [&](const CustomLatencies& c) {
                   add_network_breakpoints(out, net, true, true);
                   double reach = rate_scale(net);
                   for (const auto& lat : c.latencies) {
                     for (double b : lat.boundaries()) {
                       add_positive(out, b);
                       reach = std::max(reach, b);
                     }
                   }
                   constexpr int kRefine = 400;
                   for (int g = 1; g <= kRefine; ++g) add_positive(out, 4.0 * reach * g / kRefine);
                 },
             },
             mod);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CurveSample ratio_at(const ParallelNetwork& net, const Modification& mod, double rate) {
  CurveSample s;
  s.r = rate;
  if (rate == 0.0) return s;
  s.cost_num = modified_cost(net, mod, rate);
  s.cost_den = opt_cost(net, rate);
  s.ratio = s.cost_den > 0.0 ? s.cost_num / s.cost_den : 1.0;
  return s;
}

std::vector<CurveSample> ratio_curve(const ParallelNetwork& net, const Modification& mod,
                                     std::span<const double> rates) {
  const auto breakpoints = structural_breakpoints(net, mod);
  std::vector<CurveSample> out;
  out.reserve(rates.size());
  for (double r : rates) {
    auto sample = ratio_at(net, mod, r);
    sample.regime = static_cast<std::size_t>(std::lower_bound(breakpoints.begin(), breakpoints.end(), r) -
                                             breakpoints.begin());
    out.push_back(sample);
  }
  return out;
}

double tail_limit(const ParallelNetwork& net, const Modification& mod) {
  if (net.has_constant_last_link()) return 1.0;
  return std::visit(overloaded{
                        [&](const Unmodified&) { return 1.0; },
                        [&](const PlateauParams&) { return 1.0; },
                        [&](const ThresholdParams& p) {
                          if (p.super_efficient.empty()) return 1.0;
                          const std::size_t start = p.super_efficient.back();
                          const double all = net.efficiency_sum(net.size());
                          return all / (all - net.efficiency_sum(start));
                        },
                        [&](const CustomLatencies&) {
                          const double far = 1e6 * rate_scale(net);
                          return ratio_at(net, mod, far).ratio;
                        },
                    },
                    mod);
}

RatioSup ratio_sup(const ParallelNetwork& net, const Modification& mod) {
  const auto breakpoints = structural_breakpoints(net, mod);
  std::vector<RatioSup> candidates;
  auto consider = [&candidates](double value, double r, bool right_limit) {
    if (std::isfinite(value)) candidates.push_back(RatioSup{value, r, right_limit});
  };
  auto ratio = [&](double r) { return ratio_at(net, mod, r).ratio; };

  std::vector<double> points{0.0};
  points.insert(points.end(), breakpoints.begin(), breakpoints.end());
  const double scale = std::max(1.0, points.back());

  for (double b : breakpoints) consider(ratio(b), b, false);

  for (std::size_t m = 0; m < points.size(); ++m) {
    const double p = points[m];
    const bool unbounded = m + 1 == points.size();
    const double width = unbounded ? scale : points[m + 1] - p;
    if (width <= 1e-12 * scale) continue;

    std::array<double, 3> num{}, den{};
    for (int s = 0; s < 3; ++s) {
      const double r = p + width * 0.25 * (s + 1);
      const auto sample = ratio_at(net, mod, r);
      num[s] = sample.cost_num;
      den[s] = sample.cost_den;
      if (unbounded) consider(sample.ratio, r, false);
    }
    const auto N = Quadratic::fit(num[0], num[1], num[2]);
    const auto D = Quadratic::fit(den[0], den[1], den[2]);

    if (p > 0.0 && D.at(0.0) > 0.0) consider(N.at(0.0) / D.at(0.0), p, true);
    if (!unbounded && D.at(1.0) > 0.0) consider(N.at(1.0) / D.at(1.0), p + width, false);

    const double a = N.c2 * D.c1 - N.c1 * D.c2;
    const double b = 2.0 * (N.c2 * D.c0 - N.c0 * D.c2);
    const double c = N.c1 * D.c0 - N.c0 * D.c1;
    for (double t : real_roots(a, b, c)) {
      if (t > 0.0 && (unbounded || t < 1.0)) consider(ratio(p + t * width), p + t * width, false);
    }
  }

  consider(tail_limit(net, mod), kInfinity, false);

  // Near-ties go to the smallest rate, attained values before right limits.
  double top = -kInfinity;
  for (const auto& c : candidates) top = std::max(top, c.value);
  RatioSup best{top, kInfinity, false};
  for (const auto& c : candidates) {
    if (c.value < top - 1e-12 * std::max(1.0, std::abs(top))) continue;
    if (c.argmax < best.argmax || (c.argmax == best.argmax && best.is_right_limit && !c.is_right_limit)) {
      best = RatioSup{c.value, c.argmax, c.is_right_limit};
    }
  }
  best.value = top;
  return best;
}

ContinuityCheck continuity_no_improvement_check(const ParallelNetwork& net,
                                                std::span<const PiecewiseLatency> modified, double rate,
                                                double tol) {
  if (modified.size() != net.size()) throw std::invalid_argument("one latency per link expected");
  const auto equilibrium = water_fill(modified, rate);
  for (std::size_t i = 0; i < modified.size(); ++i) {
    const double f = equilibrium.profile.flow(i);
    const double left = modified[i].value(f);
    const double right = modified[i].right_liminf(f);
    if (!std::isfinite(left) || !std::isfinite(right) ||
        std::abs(right - left) > tol * std::max(1.0, std::abs(left))) {
      throw DomainError(ErrorCode::not_continuous_at_equilibrium,
                        "modified latency " + std::to_string(i) + " is discontinuous at its equilibrium flow");
    }
  }
  ContinuityCheck check;
  check.modified_cost = equilibrium.cost;
  check.nash_cost = nash_cost(net, rate);
  check.holds = check.modified_cost >= check.nash_cost - tol * std::max(1.0, check.nash_cost);
  return check;
}

}  // namespace anarchy
