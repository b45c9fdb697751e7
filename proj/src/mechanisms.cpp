#include "anarchy/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "anarchy/equilibrium.hpp"
#include "anarchy/error.hpp"

namespace anarchy {

namespace {

struct Phase {
  std::size_t start = 0;    // first unfrozen link
  double from = 0.0;        // rate at which the phase begins
  double frozen = 0.0;      // total flow on frozen links
};

std::vector<Phase> phases_of(const ParallelNetwork& net, const ThresholdParams& params) {
  if (params.thresholds.size() != net.size() || params.freeze_points.size() != params.super_efficient.size()) {
    throw std::invalid_argument("threshold parameters were built for another network");
  }
  std::vector<Phase> phases{Phase{}};
  for (std::size_t p = 0; p < params.super_efficient.size(); ++p) {
    Phase next{params.super_efficient[p], params.freeze_points[p], phases.back().frozen};
    for (std::size_t i = phases.back().start; i < next.start; ++i) next.frozen += params.thresholds[i];
    phases.push_back(next);
  }
  return phases;
}

void require_rate(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw DomainError(ErrorCode::negative_rate, "rate must be finite and non-negative");
  }
}

}  // namespace

ThresholdMechanism build_threshold_mechanism(const ParallelNetwork& net, std::span<const double> R) {
  const std::size_t k = net.size();
  if (R.size() + 1 != k) {
    throw DomainError(ErrorCode::bad_param_count,
                      "expected " + std::to_string(k - 1) + " parameters, got " + std::to_string(R.size()));
  }
  for (double value : R) {
    if (!(value >= 2.0)) throw DomainError(ErrorCode::param_too_small, "every R_i must be at least 2");
  }

  ThresholdParams params;
  params.R.assign(R.begin(), R.end());
  params.thresholds.assign(k, kInfinity);
  for (std::size_t m = 1; m < k; ++m) {
    if (net.link(m).a == 0.0 || net.efficiency(m) > R[m - 1] * net.efficiency_sum(m)) {
      params.super_efficient.push_back(m);
    }
  }

  std::size_t start = 0;
  double frozen = 0.0;
  for (std::size_t s : params.super_efficient) {
    const double freeze = 0.5 * net.breakpoint(s);
    const auto suffix_flow = nash_flow(net.suffix(start), std::max(0.0, freeze - frozen));
    for (std::size_t i = start; i < s; ++i) {
      params.thresholds[i] = suffix_flow.profile.flow(i - start);
      frozen += params.thresholds[i];
    }
    params.freeze_points.push_back(freeze);
    start = s;
  }

  std::vector<PiecewiseLatency> latencies;
  latencies.reserve(k);
  for (std::size_t i = 0; i < k; ++i) latencies.push_back(PiecewiseLatency::affine(net.link(i), params.thresholds[i]));
  return ThresholdMechanism{std::move(params), std::move(latencies)};
}

FlowProfile mn_flow(const ParallelNetwork& net, const ThresholdParams& params, double rate) {
  require_rate(rate);
  const auto phases = phases_of(net, params);
  std::vector<double> flows(net.size(), 0.0);
  if (rate == 0.0) return FlowProfile(0.0, std::move(flows), LatencyFamily::modified);

  std::size_t p = 0;
  while (p + 1 < phases.size() && phases[p + 1].from < rate) ++p;
  const Phase& phase = phases[p];
  for (std::size_t i = 0; i < phase.start; ++i) flows[i] = params.thresholds[i];
  const auto suffix_flow = nash_flow(net.suffix(phase.start), std::max(0.0, rate - phase.frozen));
  for (std::size_t i = phase.start; i < net.size(); ++i) flows[i] = suffix_flow.profile.flow(i - phase.start);
  return FlowProfile(rate, std::move(flows), LatencyFamily::modified);
}

std::vector<double> mn_link_start_rates(const ParallelNetwork& net, const ThresholdParams& params) {
  const auto phases = phases_of(net, params);
  std::vector<double> starts(net.size(), kInfinity);
  std::vector<bool> settled(net.size(), false);
  for (std::size_t p = 0; p < phases.size(); ++p) {
    const Phase& phase = phases[p];
    const bool last = p + 1 == phases.size();
    const double until = last ? kInfinity : phases[p + 1].from;
    const std::size_t frozen_below = last ? net.size() : phases[p + 1].start;
    const auto suffix = net.suffix(phase.start);
    for (std::size_t h = phase.start; h < net.size(); ++h) {
      if (settled[h]) continue;
      const double open = std::max(phase.from, phase.frozen + suffix.breakpoint(h - phase.start));
      if (open < until) {
        starts[h] = open;
        settled[h] = true;
      } else if (h < frozen_below) {
        settled[h] = true;  // frozen before it ever carried flow
      }
    }
  }
  return starts;
}

LinkOrderCheck mn_uses_links_no_earlier_than_opt(const ParallelNetwork& net, const ThresholdParams& params,
                                                 double tol) {
  const auto starts = mn_link_start_rates(net, params);
  for (std::size_t h = 0; h < net.size(); ++h) {
    const double opt_start = 0.5 * net.breakpoint(h);
    if (starts[h] < opt_start - tol * std::max(1.0, opt_start)) {
      return LinkOrderCheck{false, h, starts[h], opt_start};
    }
  }
  return LinkOrderCheck{};
}

PlateauParams make_plateau_params(const ParallelNetwork& net, double x1, double x2) {
  if (net.size() != 2) throw DomainError(ErrorCode::not_two_links, "the plateau mechanism needs exactly two links");
  const AffineLatency& l1 = net.link(0);
  const AffineLatency& l2 = net.link(1);
  if (l2.a == 0.0) {
    throw DomainError(ErrorCode::param_out_of_range, "the plateau mechanism needs a sloped second link");
  }
  if (!std::isfinite(x1) || !std::isfinite(x2)) {
    throw DomainError(ErrorCode::param_out_of_range, "x1 and x2 must be finite");
  }
  const double r2 = net.breakpoint(1);
  const double slack = 1e-12 * std::max(1.0, r2);
  if (x1 < 0.5 * r2 - slack || x1 > r2 + slack || x2 < r2 - slack) {
    throw DomainError(ErrorCode::param_out_of_range, "need r2/2 <= x1 <= r2 <= x2 with r2 = " + std::to_string(r2));
  }

  PlateauParams p;
  p.x1 = x1;
  p.x2 = x2;
  p.ratio = l1.a / l2.a;
  p.r_star = x1 + (l1(x2) - l2.b) / l2.a;
  p.r_star = std::max(p.r_star, x1);
  if (p.r_star < r2 - slack) {
    throw DomainError(ErrorCode::param_out_of_range, "the plateau ends before the second link opens");
  }
  p.r_star2 = p.r_star - x1 + x2;
  p.alpha = x1 / r2;
  p.beta = p.r_star / r2;
  return p;
}

bool plateau_is_identity(const PlateauParams& params) {
  return params.ratio <= kPlateauRatioFloor || params.x2 <= params.x1;
}

std::vector<PiecewiseLatency> build_plateau_mechanism(const ParallelNetwork& net, const PlateauParams& params) {
  if (net.size() != 2) throw DomainError(ErrorCode::not_two_links, "the plateau mechanism needs exactly two links");
  if (plateau_is_identity(params)) return original_latencies(net);
  const AffineLatency& l1 = net.link(0);
  std::vector<Segment> pieces{
      Segment{0.0, l1.a, l1.b},
      Segment{params.x1, 0.0, l1(params.x2)},
      Segment{params.x2, l1.a, l1.b},
  };
  return {PiecewiseLatency::from_segments(std::move(pieces)), PiecewiseLatency::affine(net.link(1))};
}

PlateauSeeds plateau_seeds(double R) {
  PlateauSeeds s;
  s.alpha0 = (149.0 * R + 2.0 * std::sqrt(894.0 * R * (R + 1.0))) / (2.0 * (125.0 * R - 24.0));
  s.beta0 = (R + std::sqrt(R) * std::sqrt(R + 4.0 * s.alpha0 * (R - s.alpha0))) / (4.0 * s.alpha0);
  return s;
}

double plateau_first_term(double R, double alpha) {
  return 4.0 * (R + 1.0) * alpha * alpha / (4.0 * alpha * alpha + 4.0 * R * alpha - R);
}

double plateau_second_term(double R, double alpha, double beta) {
  return 4.0 * beta * (R + 1.0) * (beta - alpha + R) / (R * (4.0 * beta * beta + 4.0 * beta * R - R));
}

double plateau_best_beta(double R, double alpha) {
  const double disc = R * R + 4.0 * R * R * alpha - 4.0 * R * alpha * alpha;
  return std::max(1.0, (R + std::sqrt(std::max(0.0, disc))) / (4.0 * alpha));
}

PlateauParams solve_plateau_params(const ParallelNetwork& net) {
  if (net.size() != 2) throw DomainError(ErrorCode::not_two_links, "the plateau mechanism needs exactly two links");
  if (net.link(1).a == 0.0) {
    throw DomainError(ErrorCode::param_out_of_range, "the plateau mechanism needs a sloped second link");
  }
  const double R = net.link(0).a / net.link(1).a;
  if (!(R > kPlateauRatioFloor)) {
    throw DomainError(ErrorCode::ratio_too_small, "R = a1/a2 must exceed 96/53, got " + std::to_string(R));
  }

  auto imbalance = [R](double alpha) {
    return plateau_first_term(R, alpha) - plateau_second_term(R, alpha, plateau_best_beta(R, alpha));
  };
  double lo = 0.5;
  double hi = std::min(1.0, plateau_seeds(R).alpha0);
  double alpha = hi;
  if (imbalance(lo) < 0.0 && imbalance(hi) > 0.0) {
    for (int iteration = 0; iteration < 200 && hi - lo > 1e-15; ++iteration) {
      const double mid = 0.5 * (lo + hi);
      if (imbalance(mid) > 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    alpha = 0.5 * (lo + hi);
  } else if (imbalance(lo) >= 0.0) {
    alpha = lo;
  }
  const double beta = plateau_best_beta(R, alpha);

  const double r2 = net.breakpoint(1);
  const double x1 = alpha * r2;
  const double r_star = beta * r2;
  const double x2 = (net.link(1)(r_star - x1) - net.link(0).b) / net.link(0).a;
  return make_plateau_params(net, x1, x2);
}

FlowProfile plateau_mn_flow(const ParallelNetwork& net, const PlateauParams& params, double rate) {
  require_rate(rate);
  if (net.size() != 2) throw DomainError(ErrorCode::not_two_links, "the plateau mechanism needs exactly two links");
  if (plateau_is_identity(params) || rate <= params.x1 || rate > params.r_star2) {
    auto flow = nash_flow(net, rate).profile;
    return FlowProfile(rate, {flow.flow(0), flow.flow(1)}, LatencyFamily::modified);
  }
  if (rate <= params.r_star) return FlowProfile(rate, {params.x1, rate - params.x1}, LatencyFamily::modified);
  const double second = params.r_star - params.x1;
  return FlowProfile(rate, {rate - second, second}, LatencyFamily::modified);
}

}  // namespace anarchy
