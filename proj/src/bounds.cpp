#include "anarchy/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "anarchy/error.hpp"
#include "anarchy/mechanisms.hpp"

namespace anarchy {

namespace {

// Recurrence gaps shrink roughly like g -> g^3 per link, so 4/3 - value
// drops below 1e-200 by k = 6.
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<800>,
                                         boost::multiprecision::et_off>;

void require_params(std::span<const double> R) {
  for (double value : R) {
    if (!(value >= 2.0)) throw DomainError(ErrorCode::param_too_small, "every R_i must be at least 2");
  }
}

Big four_thirds() { return Big(4) / Big(3); }

Big benign_big(std::span<const Big> R, std::size_t from, std::size_t to) {
  Big P = 1;
  for (std::size_t m = from; m < to; ++m) P *= 1 + R[m];
  const Big P2 = P * P;
  return 4 * P2 / (3 * P2 + 1);
}

Big recurrence_big(std::span<const Big> R) {
  const std::size_t n = R.size();
  std::vector<Big> E(n + 1, Big(1));
  for (std::size_t i = n; i-- > 0;) {
    Big best = benign_big(R, i, n);
    for (std::size_t j = i; j < n; ++j) {
      const Big lift = (1 + 1 / R[j]) * (1 + 1 / R[j]);
      best = std::max({best, benign_big(R, i, j), Big(lift * E[j + 1])});
    }
    E[i] = best;
  }
  return E[0];
}

BoundReport report(std::string name, std::span<const double> inputs, std::string formula, const Big& value) {
  BoundReport r;
  r.name = std::move(name);
  r.inputs.assign(inputs.begin(), inputs.end());
  r.formula = std::move(formula);
  r.value = static_cast<double>(value);
  const Big gap = four_thirds() - value;
  r.gap_to_four_thirds = static_cast<double>(gap);
  r.below_four_thirds = gap > 0;
  return r;
}

}  // namespace

BoundReport two_link_simple_bound(double R) {
  if (!(R >= 2.0)) throw DomainError(ErrorCode::param_too_small, "R must be at least 2");
  const double value = std::max(1.0 + 1.0 / R, (4.0 + 4.0 * R) / (4.0 + 3.0 * R));
  const double inputs[] = {R};
  BoundReport r = report("simple2", inputs, "max{1+1/R, (4+4R)/(4+3R)}", Big(value));
  r.value = value;
  return r;
}

BoundReport benign_bound(std::span<const double> R) {
  require_params(R);
  std::vector<Big> big(R.begin(), R.end());
  return report("benign", R, "4P^2/(3P^2+1), P = prod(1+R_i)", benign_big(big, 0, big.size()));
}

BoundReport recurrence_bound(std::span<const double> R) {
  require_params(R);
  std::vector<Big> big(R.begin(), R.end());
  return report("recurrence", R, "max{B(R_i..), max_j max{B(R_i..R_j-1), (1+1/R_j)^2 E(j+1)}}",
                recurrence_big(big));
}

std::vector<double> greedy_recurrence_parameters(std::size_t k) {
  if (k == 0) throw DomainError(ErrorCode::empty_network, "need at least one link");
  if (k > 6) throw DomainError(ErrorCode::unsupported, "greedy parameters are supported for k <= 6");
  std::vector<Big> chosen;  // R_i..R_{k-1}, built from the top
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const Big inner = recurrence_big(chosen);
    const Big target = (four_thirds() + inner) / 2;
    Big R = 2;
    while ((1 + 1 / R) * (1 + 1 / R) * inner > target) R *= 2;
    chosen.insert(chosen.begin(), R);
  }
  std::vector<double> out;
  for (const auto& R : chosen) out.push_back(static_cast<double>(R));
  return out;
}

BoundReport lower_bound_value(double R, std::size_t resolution) {
  if (!(R >= 2.0 && R <= 4.0)) {
    throw DomainError(ErrorCode::ratio_out_of_range, "the lower bound needs 2 <= R <= 4, got " + std::to_string(R));
  }
  resolution = std::max<std::size_t>(resolution, 3);
  auto objective = [R](double x1) {
    return std::max(plateau_first_term(R, x1), plateau_second_term(R, x1, plateau_best_beta(R, x1)));
  };

  std::size_t best = 0;
  double best_value = kInfinity;
  auto grid = [&](std::size_t g) { return 0.5 + 0.5 * static_cast<double>(g) / static_cast<double>(resolution - 1); };
  for (std::size_t g = 0; g < resolution; ++g) {
    const double v = objective(grid(g));
    if (v < best_value) {
      best_value = v;
      best = g;
    }
  }
  double lo = grid(best == 0 ? 0 : best - 1);
  double hi = grid(std::min(best + 1, resolution - 1));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - phi * (hi - lo);
  double d = lo + phi * (hi - lo);
  double fc = objective(c), fd = objective(d);
  while (hi - lo > 1e-14) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = objective(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = objective(d);
    }
  }
  double x1 = 0.5 * (lo + hi);
  double value = objective(x1);
  if (best_value < value) {
    x1 = grid(best);
    value = best_value;
  }

  const double inputs[] = {R};
  BoundReport r = report("lower", inputs, "min_x1 max{x1^2/Copt(x1), min_r* term(r*)} capped at 1.2",
                         Big(std::min(1.2, value)));
  r.value = std::min(1.2, value);
  r.x1 = x1;
  r.r_star = plateau_best_beta(R, x1);
  return r;
}

}  // namespace anarchy
