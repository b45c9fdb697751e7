#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "anarchy/flow.hpp"
#include "anarchy/latency.hpp"
#include "anarchy/network.hpp"

namespace anarchy {

// Threshold (freeze) mechanism for k links.
//
// Link m >= 1 is super-efficient when lambda_m > R[m-1] * Lambda(m), with
// Lambda over all links below m; a constant link always is. When the rate
// reaches breakpoint(m) / 2 for a super-efficient m, the flow on every
// unfrozen link below m is frozen at its current value. Links from the last
// super-efficient link upward keep their original latency.
struct ThresholdParams {
  std::vector<double> R;
  std::vector<std::size_t> super_efficient;  // ascending link indices
  std::vector<double> freeze_points;         // one per super-efficient link
  std::vector<double> thresholds;            // per link; +inf when unmodified
};

struct ThresholdMechanism {
  ThresholdParams params;
  std::vector<PiecewiseLatency> latencies;
};

// Throws BadParamCount unless |R| = k - 1 and ParamTooSmall if some R_i < 2.
ThresholdMechanism build_threshold_mechanism(const ParallelNetwork& net, std::span<const double> R);

// Modified Nash flow: Nash on the unfrozen suffix, frozen links at their thresholds.
FlowProfile mn_flow(const ParallelNetwork& net, const ThresholdParams& params, double rate);

// Rate at which mn_flow starts using each link; +inf for links frozen at 0.
std::vector<double> mn_link_start_rates(const ParallelNetwork& net, const ThresholdParams& params);

struct LinkOrderCheck {
  bool holds = true;
  std::size_t link = 0;
  double mn_start = 0.0;
  double opt_start = 0.0;

  explicit operator bool() const { return holds; }
};

// Every link h satisfies mn_start(h) >= breakpoint(h) / 2 - tol.
LinkOrderCheck mn_uses_links_no_earlier_than_opt(const ParallelNetwork& net, const ThresholdParams& params,
                                                 double tol = 1e-9);

// Plateau mechanism for two links: the first link's latency is lifted to
// l1(x2) on (x1, x2].
inline constexpr double kPlateauRatioFloor = 96.0 / 53.0;

struct PlateauParams {
  double x1 = 0.0;
  double x2 = 0.0;
  double r_star = 0.0;   // l2(r_star - x1) = l1(x2)
  double r_star2 = 0.0;  // r_star - x1 + x2, where MN rejoins Nash
  double ratio = 0.0;    // R = a1 / a2
  double alpha = 0.0;    // x1 / r2
  double beta = 0.0;     // r_star / r2
};

// Validates r2/2 <= x1 <= r2 <= x2 and derives the rest. Throws NotTwoLinks
// or ParamOutOfRange.
PlateauParams make_plateau_params(const ParallelNetwork& net, double x1, double x2);

// True when the mechanism leaves the network unmodified: R <= 96/53 or an
// empty plateau.
bool plateau_is_identity(const PlateauParams& params);

std::vector<PiecewiseLatency> build_plateau_mechanism(const ParallelNetwork& net, const PlateauParams& params);

struct PlateauSeeds {
  double alpha0 = 0.0;
  double beta0 = 0.0;
};

PlateauSeeds plateau_seeds(double R);

// The two competing ratios on the normalized instance l1 = x, l2 = x/R + 1:
// the ratio at x1 (MN still on one link) and the right limit at r_star.
double plateau_first_term(double R, double alpha);
double plateau_second_term(double R, double alpha, double beta);
// argmin over beta >= 1 of plateau_second_term.
double plateau_best_beta(double R, double alpha);

// Balances the two terms by bisection on alpha in [1/2, alpha0]. Throws
// RatioTooSmall when R <= 96/53.
PlateauParams solve_plateau_params(const ParallelNetwork& net);

// Worst modified equilibrium under the plateau mechanism.
FlowProfile plateau_mn_flow(const ParallelNetwork& net, const PlateauParams& params, double rate);

}  // namespace anarchy
