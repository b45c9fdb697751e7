#include <doctest.h>

#include <random>

#include "anarchy/error.hpp"
#include "anarchy/flow.hpp"
#include "anarchy/latency.hpp"
#include "anarchy/network.hpp"
#include "anarchy/sampling.hpp"

using namespace anarchy;

namespace {

ParallelNetwork make(std::vector<AffineLatency> links) { return normalize_network(links); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.code();
  }
  FAIL("no DomainError thrown");
  return ErrorCode::unsupported;
}

}  // namespace

TEST_CASE("normalize sorts by offset and merges equal offsets") {
  const auto pigou = make({{1, 0}, {0, 1}});
  CHECK(pigou.size() == 2);
  CHECK(pigou.breakpoint(0) == 0.0);
  CHECK(pigou.breakpoint(1) == doctest::Approx(1.0).epsilon(1e-15));

  const auto single = make({{1, 0}});
  CHECK(single.size() == 1);
  CHECK(single.breakpoint(0) == 0.0);

  const auto merged = make({{1, 0}, {1, 0}});
  REQUIRE(merged.size() == 1);
  CHECK(merged.link(0).a == doctest::Approx(0.5));
  CHECK(merged.link(0).b == 0.0);

  const auto shuffled = make({{0.5, 3}, {2, 1}, {1, 2}});
  CHECK(shuffled.link(0).b == 1.0);
  CHECK(shuffled.link(1).b == 2.0);
  CHECK(shuffled.link(2).b == 3.0);
}

TEST_CASE("normalize rejects bad instances") {
  CHECK(code_of([] { make({}); }) == ErrorCode::empty_network);
  CHECK(code_of([] { make({{-1, 0}}); }) == ErrorCode::negative_coefficient);
  CHECK(code_of([] { make({{1, -0.5}}); }) == ErrorCode::negative_coefficient);
  CHECK(code_of([] { make({{std::nan(""), 0}}); }) == ErrorCode::non_finite_coefficient);
  CHECK(code_of([] { make({{0, 0}, {1, 1}}); }) == ErrorCode::zero_slope_not_last);
  CHECK(code_of([] { make({{1, 0}, {0, 1}, {0, 2}}); }) == ErrorCode::zero_slope_not_last);
}

TEST_CASE("a constant link merged with a sloped one stays constant") {
  const auto net = make({{1, 0}, {0, 1}, {2, 1}});
  REQUIRE(net.size() == 2);
  CHECK(net.link(1).a == 0.0);
  CHECK(net.has_constant_last_link());
}

TEST_CASE("prefix identities and idempotence on random networks") {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 500; ++n) {
    const auto net = random_network(rng, 1 + rng() % 8);
    for (std::size_t j = 1; j <= net.size(); ++j) {
      const double b = net.link(j - 1).b;
      const double r = net.breakpoint(j - 1);
      const double lhs1 = net.gamma_sum(j) + r;
      const double lhs2 = net.gamma_sum(j - 1) + r;
      CHECK(std::abs(lhs1 - b * net.efficiency_sum(j)) <= 1e-12 * std::max(1.0, std::abs(lhs1)));
      CHECK(std::abs(lhs2 - b * net.efficiency_sum(j - 1)) <= 1e-12 * std::max(1.0, std::abs(lhs2)));
      if (j > 1) CHECK(net.breakpoint(j - 1) >= net.breakpoint(j - 2));
    }
    CHECK(normalize_network(net.links()) == net);
  }
}

TEST_CASE("piecewise latency evaluation and right limits") {
  // l1 = x lifted to 1.3 on (0.9, 1.3].
  const auto plateau = PiecewiseLatency::from_segments({{0.0, 1.0, 0.0}, {0.9, 0.0, 1.3}, {1.3, 1.0, 0.0}});
  CHECK(plateau.value(0.9) == doctest::Approx(0.9));
  CHECK(plateau.value(1.0) == doctest::Approx(1.3));
  CHECK(plateau.right_liminf(0.9) == doctest::Approx(1.3));
  CHECK(plateau.value(2.0) == doctest::Approx(2.0));

  const auto identity = PiecewiseLatency::affine({1.0, 0.0});
  for (double x : {0.0, 0.4, 3.0}) {
    CHECK(identity.value(x) == doctest::Approx(x));
    CHECK(identity.right_liminf(x) == doctest::Approx(x));
  }

  const auto capped = PiecewiseLatency::affine({1.0, 0.0}, 0.5);
  CHECK(capped.value(0.5) == 0.5);
  CHECK(std::isinf(capped.value(0.6)));
  CHECK(std::isinf(capped.right_liminf(0.5)));
}

TEST_CASE("level inverses are segment-exact") {
  const auto plateau = PiecewiseLatency::from_segments({{0.0, 1.0, 0.0}, {0.9, 0.0, 1.3}, {1.3, 1.0, 0.0}});
  CHECK(plateau.max_flow_at_level(1.3) == doctest::Approx(1.3));
  CHECK(plateau.min_flow_at_level(1.3) == doctest::Approx(0.9));
  CHECK(plateau.max_flow_at_level(1.0) == doctest::Approx(0.9));
  CHECK(plateau.min_flow_at_level(0.5) == doctest::Approx(0.5));
  CHECK(plateau.max_flow_at_level(-1.0) == 0.0);

  const auto constant = PiecewiseLatency::affine({0.0, 1.0});
  CHECK(std::isinf(constant.max_flow_at_level(1.0)));
  CHECK(constant.min_flow_at_level(1.0) == 0.0);

  const auto capped = PiecewiseLatency::affine({1.0, 0.0}, 0.5);
  CHECK(capped.max_flow_at_level(10.0) == 0.5);
}

TEST_CASE("from_segments validates shape") {
  CHECK(code_of([] { PiecewiseLatency::from_segments({}); }) == ErrorCode::invalid_latency);
  CHECK(code_of([] { PiecewiseLatency::from_segments({{0.1, 1, 0}}); }) == ErrorCode::invalid_latency);
  CHECK(code_of([] { PiecewiseLatency::from_segments({{0, -1, 0}}); }) == ErrorCode::invalid_latency);
  CHECK(code_of([] { PiecewiseLatency::from_segments({{0, 1, 0}, {1, 0, 0.5}}); }) == ErrorCode::invalid_latency);
  CHECK(code_of([] { PiecewiseLatency::from_segments({{0, 1, 0}, {1, 1, 0}, {0.5, 1, 0}}); }) ==
        ErrorCode::invalid_latency);
  CHECK(code_of([] { PiecewiseLatency::from_segments({{0, 1, 0}, {1, 0, 2}}, 0.5); }) == ErrorCode::invalid_latency);
}

TEST_CASE("latency validator catches non-domination") {
  const AffineLatency original{1.0, 0.0};
  const auto ok = validate_latency(PiecewiseLatency::affine({2.0, 0.0}), original, 5.0);
  CHECK(ok.monotone);
  CHECK(ok.dominates);
  const auto low = validate_latency(PiecewiseLatency::affine({0.5, 0.0}), original, 5.0);
  CHECK_FALSE(low.dominates);
}

TEST_CASE("flow profiles") {
  const auto pigou = make({{1, 0}, {0, 1}});
  const FlowProfile half(1.0, {0.5, 0.5});
  CHECK(half.cost(pigou) == doctest::Approx(0.75));
  CHECK(half.used_count() == 2);
  CHECK_THROWS_AS(FlowProfile(1.0, {0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(FlowProfile(1.0, {1.5, -0.5}), std::invalid_argument);

  const std::vector<PiecewiseLatency> capped{PiecewiseLatency::affine({1, 0}, 0.5),
                                             PiecewiseLatency::affine({0, 1})};
  CHECK(half.cost(capped) == doctest::Approx(0.75));
  CHECK(half.level(capped) == doctest::Approx(1.0));
  const FlowProfile over(1.0, {0.6, 0.4});
  CHECK(std::isinf(over.cost(capped)));
}
