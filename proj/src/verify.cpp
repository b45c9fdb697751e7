#include "anarchy/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "anarchy/analysis.hpp"
#include "anarchy/artifacts.hpp"
#include "anarchy/bounds.hpp"
#include "anarchy/equilibrium.hpp"
#include "anarchy/mechanisms.hpp"
#include "anarchy/sampling.hpp"

namespace anarchy {

namespace {

// Collects one property; the first failure's witness is kept.
class Property {
 public:
  explicit Property(std::string name) : result_{std::move(name), true, {}} {}

  void expect(bool ok, const std::string& witness) {
    ++checked_;
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.detail = witness;
    }
  }
  PropertyResult done() {
    if (result_.passed) result_.detail = std::to_string(checked_) + " checks";
    return result_;
  }

 private:
  PropertyResult result_;
  std::size_t checked_ = 0;
};

std::string fmt(double v) { return format_shortest(v); }

bool close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); }

ParallelNetwork net_of(std::initializer_list<AffineLatency> links) {
  std::vector<AffineLatency> v(links);
  return normalize_network(v);
}

std::vector<PropertyResult> core_suite(double tol) {
  std::vector<PropertyResult> out;
  const auto pigou = net_of({{1, 0}, {0, 1}});
  const auto pair = net_of({{1, 0}, {1, 1}});

  {
    Property p("normalize_idempotent");
    for (const auto& net : {pigou, pair, net_of({{1, 0}, {1, 0}}), net_of({{2, 3}, {1, 1}, {0.5, 2}})}) {
      p.expect(normalize_network(net.links()) == net, "normalizing twice changed a network");
    }
    out.push_back(p.done());
  }
  {
    Property p("pigou_closed_forms");
    const auto nash = nash_flow(pigou, 1.0);
    const auto opt = opt_flow(pigou, 1.0);
    p.expect(close(nash.cost, 1.0, tol) && close(nash.profile.flow(0), 1.0, tol), "Nash(1) = " + fmt(nash.cost));
    p.expect(close(opt.cost, 0.75, tol) && close(opt.profile.flow(0), 0.5, tol), "Opt(1) = " + fmt(opt.cost));
    p.expect(close(opt_flow(pair, 1.0).cost, 7.0 / 8.0, tol), "two-link Opt(1) != 7/8");
    out.push_back(p.done());
  }
  {
    Property p("cost_increment");
    const double delta = cost_increment(pair, 1.0, 2.0, 2, FlowKind::nash);
    p.expect(close(nash_cost(pair, 1.0) + delta, nash_cost(pair, 2.0), tol), "C(1) + delta = " + fmt(1.0 + delta));
    out.push_back(p.done());
  }
  {
    Property p("water_fill_matches_nash");
    for (const auto& net : {pigou, pair, net_of({{1, 0}, {0.25, 1}, {0.1, 3}})}) {
      const auto lats = original_latencies(net);
      for (double r : {0.0, 0.3, 1.0, 2.5, 7.0}) {
        const auto wf = water_fill(lats, r, LatencyFamily::original);
        p.expect(close(wf.cost, nash_cost(net, r), tol), "r=" + fmt(r) + " water_fill cost " + fmt(wf.cost));
      }
    }
    out.push_back(p.done());
  }
  {
    Property p("csv_round_trip");
    const auto curve = build_curve(pigou, Unmodified{}, 3.0, 50, tol);
    const auto rows = parse_curve_csv(curve_to_csv(curve));
    p.expect(rows.size() == curve.rows.size(), "row count changed");
    for (std::size_t i = 0; i < std::min(rows.size(), curve.rows.size()); ++i) {
      p.expect(rows[i].sample.ratio == curve.rows[i].sample.ratio, "row " + std::to_string(i) + " ratio changed");
    }
    out.push_back(p.done());
  }
  return out;
}

std::vector<PropertyResult> paper_suite(double tol) {
  std::vector<PropertyResult> out;
  const auto pigou = net_of({{1, 0}, {0, 1}});
  {
    Property p("pigou_poa_4_3");
    const auto sup = ratio_sup(pigou, Unmodified{});
    p.expect(close(sup.value, 4.0 / 3.0, 1e-12) && close(sup.argmax, 1.0, 1e-12),
             "sup " + fmt(sup.value) + " at " + fmt(sup.argmax));
    out.push_back(p.done());
  }
  {
    Property p("pigou_capped_epoa_1");
    const double R[] = {2.0};
    const auto mech = build_threshold_mechanism(pigou, R);
    const auto sup = ratio_sup(pigou, mech.params);
    p.expect(close(sup.value, 1.0, 1e-12), "sup " + fmt(sup.value));
    out.push_back(p.done());
  }
  {
    Property p("two_link_5_4");
    p.expect(two_link_simple_bound(4.0).value == 1.25, "simple bound at R=4");
    const auto net = net_of({{1, 0}, {1.0 / (4.0 * (1.0 - 1e-4)), 1}});
    const double R[] = {4.0};
    const auto sup = ratio_sup(net, build_threshold_mechanism(net, R).params);
    p.expect(sup.value >= 1.25 - 1e-3 && sup.value <= 1.25 + tol, "near-worst family reaches " + fmt(sup.value));
    out.push_back(p.done());
  }
  {
    Property p("plateau_1_192");
    for (double R : {96.0 / 53.0 + 1e-3, 2.0, 2.1, 3.0, 5.0, 10.0, 100.0}) {
      const auto net = normalized_two_link(R);
      const auto sup = ratio_sup(net, solve_plateau_params(net));
      p.expect(sup.value <= 1.192 + 1e-3, "R=" + fmt(R) + " sup " + fmt(sup.value));
    }
    out.push_back(p.done());
  }
  {
    Property p("lower_bound_1_191");
    const auto lb = lower_bound_value(2.1);
    p.expect(lb.value >= 1.191, "value " + fmt(lb.value));
    out.push_back(p.done());
  }
  {
    Property p("recurrence_below_4_3");
    const double R7[] = {7.0};
    p.expect(recurrence_bound(R7).value == 256.0 / 193.0, "R=[7] gives " + fmt(recurrence_bound(R7).value));
    for (std::size_t k = 1; k <= 6; ++k) {
      const auto R = greedy_recurrence_parameters(k);
      p.expect(recurrence_bound(R).below_four_thirds, "greedy k=" + std::to_string(k));
    }
    const double R4[] = {4.0};
    p.expect(close(benign_bound(R4).value, 25.0 / 19.0, 1e-12), "benign R=[4]");
    out.push_back(p.done());
  }
  return out;
}

std::vector<PropertyResult> random_suite(std::uint64_t seed, double tol) {
  std::vector<PropertyResult> out;
  std::mt19937_64 rng(seed);
  Property equivalence("water_fill_matches_nash");
  Property poa("poa_at_most_4_3");
  Property flow_ratio("nash_opt_flow_ratio");
  Property usage("mn_no_earlier_than_opt");
  Property monotone("used_count_monotone");

  for (int n = 0; n < 50; ++n) {
    const std::size_t k = 1 + static_cast<std::size_t>(rng() % 8);
    const auto net = random_network(rng, k);
    const auto lats = original_latencies(net);
    const double top = 2.0 * net.breakpoint(net.size() - 1) + 1.0;
    std::size_t last_nash = 0, last_opt = 0;
    for (int s = 0; s < 10; ++s) {
      const double r = top * (s + uniform(rng, 0.0, 1.0)) / 10.0;
      const auto nash = nash_flow(net, r);
      const auto opt = opt_flow(net, r);
      const auto wf = water_fill(lats, r, LatencyFamily::original);
      const std::string at = "seed " + std::to_string(seed) + " net " + std::to_string(n) + " r=" + fmt(r);
      equivalence.expect(close(wf.cost, nash.cost, tol), at + ": costs " + fmt(wf.cost) + " vs " + fmt(nash.cost));
      poa.expect(nash.cost <= 4.0 / 3.0 * opt.cost + tol * std::max(1.0, opt.cost), at);
      for (std::size_t i = 0; i < net.size(); ++i) {
        if (opt.profile.flow(i) <= 0.0) continue;
        const double lambda_h = net.efficiency_sum(opt.used_count);
        const double bound = 2.0 * lambda_h / (net.efficiency(i) + lambda_h);
        flow_ratio.expect(nash.profile.flow(i) / opt.profile.flow(i) <= bound + tol, at + " link " + std::to_string(i));
      }
      monotone.expect(nash.used_count >= last_nash && opt.used_count >= last_opt, at);
      last_nash = nash.used_count;
      last_opt = opt.used_count;
    }
    std::vector<double> R;
    for (std::size_t i = 0; i + 1 < net.size(); ++i) R.push_back(uniform(rng, 2.0, 8.0));
    const auto mech = build_threshold_mechanism(net, R);
    const auto check = mn_uses_links_no_earlier_than_opt(net, mech.params);
    usage.expect(static_cast<bool>(check), "net " + std::to_string(n) + " link " + std::to_string(check.link));
  }
  for (auto* p : {&equivalence, &poa, &flow_ratio, &usage, &monotone}) out.push_back(p->done());

  Property two_link("two_link_certificate");
  for (int n = 0; n < 50; ++n) {
    const auto net = random_network(rng, 2);
    if (net.size() != 2) continue;
    const double R[] = {4.0};
    const auto mech = build_threshold_mechanism(net, R);
    const bool benign = mech.params.super_efficient.empty();
    const double bound = benign ? (4.0 + 16.0) / (4.0 + 12.0) : 1.25;
    const auto sup = ratio_sup(net, mech.params);
    two_link.expect(sup.value <= bound + tol, "instance " + std::to_string(n) + " sup " + fmt(sup.value));
  }
  out.push_back(two_link.done());
  return out;
}

}  // namespace

std::vector<PropertyResult> run_suite(std::string_view suite, std::uint64_t seed, double tol) {
  if (suite == "core") return core_suite(tol);
  if (suite == "paper") return paper_suite(tol);
  if (suite == "random") return random_suite(seed, tol);
  throw std::invalid_argument("unknown suite " + std::string(suite));
}

}  // namespace anarchy
