#include <doctest.h>

#include <random>

#include "anarchy/equilibrium.hpp"
#include "anarchy/error.hpp"
#include "anarchy/mechanisms.hpp"
#include "anarchy/sampling.hpp"
#include "support/oracles.hpp"

using namespace anarchy;

namespace {

ParallelNetwork make(std::vector<AffineLatency> links) { return normalize_network(links); }

bool close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); }

}  // namespace

TEST_CASE("Nash closed form") {
  const auto pigou = make({{1, 0}, {0, 1}});
  auto n = nash_flow(pigou, 1.0);
  CHECK(n.profile.flow(0) == doctest::Approx(1.0));
  CHECK(n.profile.flow(1) == doctest::Approx(0.0));
  CHECK(n.cost == doctest::Approx(1.0));

  const auto pair = make({{1, 0}, {1, 1}});
  n = nash_flow(pair, 1.0);
  CHECK(n.used_count == 1);  // tie at r = r2 goes to the smaller count
  CHECK(n.profile.flow(0) == doctest::Approx(1.0));
  CHECK(n.cost == doctest::Approx(1.0));
  CHECK(n.level == doctest::Approx(1.0));

  n = nash_flow(pair, 0.0);
  CHECK(n.cost == 0.0);
  CHECK(n.profile.flow(0) == 0.0);

  CHECK_THROWS_AS(nash_flow(pair, -1.0), DomainError);
}

TEST_CASE("Opt closed form against a grid minimum") {
  const auto pigou = make({{1, 0}, {0, 1}});
  auto o = opt_flow(pigou, 1.0);
  CHECK(o.profile.flow(0) == doctest::Approx(0.5));
  CHECK(o.profile.flow(1) == doctest::Approx(0.5));
  CHECK(o.cost == doctest::Approx(0.75));

  const auto pair = make({{1, 0}, {1, 1}});
  o = opt_flow(pair, 1.0);
  // Frozen from the grid oracle below: flows (3/4, 1/4), cost 7/8.
  CHECK(oracle::grid_opt_two_links(pair, 1.0) == doctest::Approx(0.875).epsilon(1e-9));
  CHECK(o.profile.flow(0) == doctest::Approx(0.75));
  CHECK(o.profile.flow(1) == doctest::Approx(0.25));
  CHECK(o.cost == doctest::Approx(0.875).epsilon(1e-14));

  o = opt_flow(pair, 0.4);
  CHECK(o.used_count == 1);
  CHECK(o.cost == doctest::Approx(0.16));
}

TEST_CASE("cost increments") {
  const auto pair = make({{1, 0}, {1, 1}});
  const double delta = cost_increment(pair, 1.0, 2.0, 2, FlowKind::nash);
  CHECK(delta == doctest::Approx(2.0));
  CHECK(nash_cost(pair, 1.0) + delta == doctest::Approx(nash_cost(pair, 2.0)));
  CHECK(nash_cost(pair, 2.0) == doctest::Approx(3.0));

  CHECK(cost_increment(pair, 1.5, 1.5, 2, FlowKind::nash) == 0.0);

  const auto quarter = make({{1, 0}, {0.25, 1}});
  CHECK(cost_increment(quarter, 0.1, 0.2, 1, FlowKind::opt) == doctest::Approx(0.03));

  CHECK_THROWS_AS(cost_increment(pair, 0.5, 1.5, 1, FlowKind::nash), DomainError);
  CHECK_THROWS_AS(cost_increment(pair, 0.2, 0.8, 2, FlowKind::opt), DomainError);
}

TEST_CASE("increment identities on random networks") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 500; ++n) {
    const auto net = random_network(rng, 1 + rng() % 6);
    for (FlowKind kind : {FlowKind::nash, FlowKind::opt}) {
      const double scale = kind == FlowKind::nash ? 1.0 : 0.5;
      const std::size_t j = 1 + rng() % net.size();
      const double lo = net.breakpoint(j - 1) * scale;
      const double hi = j < net.size() ? net.breakpoint(j) * scale : lo + 10.0;
      const double s = lo + (hi - lo) * uniform(rng, 0.0, 1.0);
      const double r = s + (hi - s) * uniform(rng, 0.0, 1.0);
      auto C = [&](double x) { return kind == FlowKind::nash ? nash_cost(net, x) : opt_cost(net, x); };
      CHECK(close(C(s) + cost_increment(net, s, r, j, kind), C(r), 1e-9));
    }
  }
}

TEST_CASE("constant last link limits") {
  const auto pigou = make({{1, 0}, {0, 1}});
  const auto n = nash_flow(pigou, 3.0);
  CHECK(n.profile.flow(0) == doctest::Approx(1.0));
  CHECK(n.profile.flow(1) == doctest::Approx(2.0));
  CHECK(n.level == 1.0);
  const auto o = opt_flow(pigou, 3.0);
  CHECK(o.profile.flow(0) == doctest::Approx(0.5));
  CHECK(o.cost == doctest::Approx(0.25 + 2.5));
  CHECK(cost_increment(pigou, 1.0, 3.0, 2, FlowKind::nash) == doctest::Approx(2.0));
}

TEST_CASE("water filling on the Pigou network") {
  const auto pigou = make({{1, 0}, {0, 1}});
  const auto lats = original_latencies(pigou);
  const auto wf = water_fill(lats, 1.0, LatencyFamily::original);
  CHECK(wf.level == doctest::Approx(1.0));
  CHECK(is_user_equilibrium(lats, wf.profile));
  // The grid oracle finds exactly one equilibrium split: everything on link 1.
  const auto grid = oracle::grid_equilibria_two_links(lats[0], lats[1], 1.0);
  REQUIRE(grid.size() == 1);
  CHECK(grid.front() == doctest::Approx(1.0));
  CHECK(wf.intervals[0].max == doctest::Approx(1.0));

  const std::vector<PiecewiseLatency> one{PiecewiseLatency::affine({2, 1})};
  const auto single = water_fill(one, 3.0);
  CHECK(single.profile.flow(0) == 3.0);
  CHECK(single.level == doctest::Approx(7.0));
}

TEST_CASE("water filling rejects infeasible caps") {
  const std::vector<PiecewiseLatency> lats{PiecewiseLatency::affine({1, 0}, 0.5),
                                           PiecewiseLatency::affine({1, 1}, 0.25)};
  try {
    water_fill(lats, 1.0);
    FAIL("expected InfeasibleRate");
  } catch (const DomainError& e) {
    CHECK(e.code() == ErrorCode::infeasible_rate);
  }
  CHECK(water_fill(lats, 0.75).profile.flow(1) == doctest::Approx(0.25));
}

TEST_CASE("oracle equivalence on random networks") {
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 200; ++n) {
    const auto net = random_network(rng, 1 + rng() % 8);
    const auto lats = original_latencies(net);
    const double top = 2.0 * net.breakpoint(net.size() - 1) + 1.0;
    for (int s = 0; s < 5; ++s) {
      const double r = uniform(rng, 0.0, top);
      const auto nash = nash_flow(net, r);
      const auto wf = water_fill(lats, r, LatencyFamily::original);
      const auto ref = oracle::level_bisection_nash(net, r);
      CHECK(close(wf.cost, nash.cost, 1e-9));
      for (std::size_t i = 0; i < net.size(); ++i) {
        CHECK(close(wf.profile.flow(i), nash.profile.flow(i), 1e-9));
        CHECK(close(ref[i], nash.profile.flow(i), 1e-9));
      }
      CHECK(is_user_equilibrium(lats, nash.profile));
    }
  }
}

TEST_CASE("Opt optimality") {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 60; ++n) {
    const auto net = random_network(rng, 1 + rng() % 6);
    const double r = uniform(rng, 0.0, 2.0 * net.breakpoint(net.size() - 1) + 1.0);
    const double best = opt_cost(net, r);
    const auto pg = oracle::projected_gradient_opt(net, r);
    CHECK(close(best, oracle::total_cost(net, pg), 1e-7));
    for (int m = 0; m < 1000; ++m) {
      CHECK(best <= oracle::total_cost(net, oracle::random_profile(rng, net.size(), r)) + 1e-12);
    }
  }
}

TEST_CASE("Nash over Opt flow ratio, link usage order and the 4/3 anchor") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 500; ++n) {
    const auto net = random_network(rng, 1 + rng() % 8);
    std::size_t last_nash = 0, last_opt = 0;
    const double top = 2.0 * net.breakpoint(net.size() - 1) + 1.0;
    for (int s = 1; s <= 8; ++s) {
      const double r = top * s / 8.0;
      const auto nash = nash_flow(net, r);
      const auto opt = opt_flow(net, r);
      const double lambda_h = net.efficiency_sum(opt.used_count);
      for (std::size_t i = 0; i < net.size(); ++i) {
        if (opt.profile.flow(i) <= 0.0) continue;
        CHECK(nash.profile.flow(i) / opt.profile.flow(i) <= 2.0 * lambda_h / (net.efficiency(i) + lambda_h) + 1e-9);
      }
      CHECK(nash.used_count >= last_nash);
      CHECK(opt.used_count >= last_opt);
      last_nash = nash.used_count;
      last_opt = opt.used_count;
      CHECK(nash.cost <= 4.0 / 3.0 * opt.cost + 1e-9 * std::max(1.0, opt.cost));
    }
    for (std::size_t j = 1; j < net.size(); ++j) {
      const double rj = net.breakpoint(j);
      CHECK(nash_flow(net, rj).profile.flow(j) == 0.0);
      CHECK(nash_flow(net, rj * (1 + 1e-9) + 1e-12).profile.flow(j) > 0.0);
      CHECK(opt_flow(net, rj / 2).profile.flow(j) == 0.0);
      CHECK(opt_flow(net, rj / 2 * (1 + 1e-9) + 1e-12).profile.flow(j) > 0.0);
    }
  }
}

TEST_CASE("user equilibrium verifier") {
  const auto pigou = make({{1, 0}, {0, 1}});
  const auto lats = original_latencies(pigou);
  CHECK(is_user_equilibrium(lats, FlowProfile(1.0, {1.0, 0.0})));
  const auto check = is_user_equilibrium(lats, FlowProfile(1.0, {0.5, 0.5}));
  CHECK_FALSE(check);
  CHECK(check.from == 1);
  CHECK(check.to == 0);
  CHECK(check.from_latency == 1.0);
  CHECK(check.to_right_liminf == 0.5);

  const auto net = normalized_two_link(2.0);
  const auto params = solve_plateau_params(net);
  const auto plateau = build_plateau_mechanism(net, params);
  const double x1 = params.x1, rs = params.r_star;
  CHECK(is_user_equilibrium(plateau, FlowProfile(rs, {x1, rs - x1}, LatencyFamily::modified)));
  const double eps = 1e-3;
  CHECK_FALSE(is_user_equilibrium(plateau, FlowProfile(rs, {x1 + eps, rs - x1 - eps}, LatencyFamily::modified)));
  // Just past r*, the plateau flow is the only equilibrium.
  const double r = rs + eps;
  CHECK(is_user_equilibrium(plateau, FlowProfile(r, {x1 + eps, rs - x1}, LatencyFamily::modified)));
  CHECK_FALSE(is_user_equilibrium(plateau, FlowProfile(r, {x1, r - x1}, LatencyFamily::modified)));
}

TEST_CASE("worst equilibrium for two links") {
  const auto pair = make({{1, 0}, {0.5, 1}});
  const auto lats = original_latencies(pair);
  for (double r : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(worst_equilibrium_cost_two_links(lats, r) == doctest::Approx(nash_cost(pair, r)).epsilon(1e-9));
  }

  const auto pigou = make({{1, 0}, {0, 1}});
  const std::vector<PiecewiseLatency> capped{PiecewiseLatency::affine({1, 0}, 0.5), PiecewiseLatency::affine({0, 1})};
  CHECK(worst_equilibrium_cost_two_links(capped, 1.0) == doctest::Approx(0.75));
  CHECK(worst_equilibrium_cost_two_links(capped, 1.0) / opt_cost(pigou, 1.0) == doctest::Approx(1.0));

  const auto net = normalized_two_link(2.0);
  const auto params = solve_plateau_params(net);
  const auto plateau = build_plateau_mechanism(net, params);
  const double limit = (params.x2) * params.r_star;  // l1(x2) * r*
  const double just_after = params.r_star * (1 + 1e-7);
  CHECK(worst_equilibrium_cost_two_links(plateau, just_after) == doctest::Approx(limit).epsilon(1e-6));

  CHECK_THROWS_AS(worst_equilibrium_two_links(original_latencies(make({{1, 0}, {1, 1}, {1, 2}})), 1.0),
                  DomainError);
}

TEST_CASE("worst equilibrium picks the costliest of several") {
  // A shared flat latency makes every split along the plateau an equilibrium.
  const std::vector<PiecewiseLatency> lats{
      PiecewiseLatency::from_segments({{0, 1, 0}, {0.5, 0, 1}}),
      PiecewiseLatency::from_segments({{0, 0, 1}}),
  };
  const auto grid = oracle::grid_equilibria_two_links(lats[0], lats[1], 2.0, 2000);
  CHECK(grid.size() > 1000);
  double best = 0.0;
  for (double x : grid) best = std::max(best, x * lats[0].value(x) + (2.0 - x) * lats[1].value(2.0 - x));
  CHECK(worst_equilibrium_cost_two_links(lats, 2.0) == doctest::Approx(best).epsilon(1e-9));
}
