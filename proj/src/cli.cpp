#include "anarchy/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "anarchy/analysis.hpp"
#include "anarchy/artifacts.hpp"
#include "anarchy/bounds.hpp"
#include "anarchy/equilibrium.hpp"
#include "anarchy/error.hpp"
#include "anarchy/io.hpp"
#include "anarchy/mechanisms.hpp"
#include "anarchy/verify.hpp"

namespace anarchy {

namespace {

double tolerance_from_env() {
  const char* raw = std::getenv("ANARCHY_TOL");
  if (raw == nullptr || *raw == '\0') return kDefaultTolerance;
  char* end = nullptr;
  const double tol = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(tol > 0.0) || !std::isfinite(tol)) {
    throw ParseError(std::string("ANARCHY_TOL is not a positive number: ") + raw, 1, 1);
  }
  return tol;
}

struct Loaded {
  ParallelNetwork net;
  Modification mod;
};

Loaded load(const std::string& network_file, const std::string& mechanism_file, RunManifest* manifest) {
  const std::string net_bytes = read_file(network_file);
  if (manifest) manifest->add_input(network_file, net_bytes);
  auto net = parse_network(net_bytes);
  Modification mod = Unmodified{};
  if (!mechanism_file.empty()) {
    const std::string mech_bytes = read_file(mechanism_file);
    if (manifest) manifest->add_input(mechanism_file, mech_bytes);
    mod = resolve_mechanism(net, parse_mechanism(mech_bytes));
  }
  return Loaded{std::move(net), std::move(mod)};
}

void print_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t c = 0; c < cells.size(); ++c) out << (c == 0 ? "" : "  ") << std::setw(12) << cells[c];
  out << "\n";
}

int cmd_solve(std::ostream& out, const std::string& network_file, const std::string& mechanism_file, double rate,
              const std::string& which) {
  const auto [net, mod] = load(network_file, mechanism_file, nullptr);
  std::vector<PiecewiseLatency> lats = original_latencies(net);
  FlowProfile profile(0.0, std::vector<double>(net.size(), 0.0));
  double level = 0.0;

  if (which == "nash") {
    auto result = nash_flow(net, rate);
    profile = result.profile;
    level = result.level;
  } else if (which == "opt") {
    auto result = opt_flow(net, rate);
    profile = result.profile;
    level = result.level;
  } else {
    lats = modified_latencies(net, mod);
    if (const auto* t = std::get_if<ThresholdParams>(&mod)) {
      profile = mn_flow(net, *t, rate);
    } else if (const auto* p = std::get_if<PlateauParams>(&mod)) {
      profile = plateau_mn_flow(net, *p, rate);
    } else {
      profile = nash_flow(net, rate).profile;
    }
    level = profile.level(lats);
  }
  if (rate == 0.0) level = 0.0;

  print_row(out, {"link", "a", "b", "flow", "latency"});
  for (std::size_t i = 0; i < net.size(); ++i) {
    print_row(out, {std::to_string(i + 1), format_short(net.link(i).a), format_short(net.link(i).b),
                    format_short(profile.flow(i)), format_short(lats[i].value(profile.flow(i)))});
  }
  out << "cost " << format_short(profile.cost(lats)) << "\n";
  out << "used_links " << profile.used_count() << "\n";
  out << (which == "opt" ? "marginal_level " : "level ") << format_short(level) << "\n";
  return kExitOk;
}

int cmd_curve(std::ostream& out, const std::vector<std::string>& command, const std::string& network_file,
              const std::string& mechanism_file, std::optional<double> rmax, std::size_t samples,
              const std::string& csv_path, const std::string& svg_path, double tol) {
  RunManifest manifest;
  manifest.command_line = command;
  manifest.tolerance = tol;
  const auto [net, mod] = load(network_file, mechanism_file, &manifest);
  const double reach = rmax ? *rmax : default_rmax(net, mod);
  const auto curve = build_curve(net, mod, reach, samples, tol);

  write_file(csv_path, curve_to_csv(curve));
  manifest.outputs.push_back(csv_path);
  if (!svg_path.empty()) {
    write_file(svg_path, curve_to_svg(curve));
    manifest.outputs.push_back(svg_path);
  }
  const std::string manifest_path = csv_path + ".manifest.json";
  manifest.outputs.push_back(manifest_path);
  manifest.timestamp = utc_timestamp();
  write_file(manifest_path, manifest.to_json());

  const auto sup = ratio_sup(net, mod);
  out << "rows " << curve.rows.size() << "\n";
  out << "sup " << format_short(sup.value) << " at r=" << format_short(sup.argmax)
      << (sup.is_right_limit ? " (right limit)" : "") << "\n";
  for (const auto& path : manifest.outputs) out << "wrote " << path << "\n";
  return kExitOk;
}

int cmd_bounds(std::ostream& out, const std::string& kind, const std::vector<double>& R, std::optional<double> ratio,
               std::optional<std::size_t> greedy, std::size_t resolution) {
  auto need_ratio = [&]() {
    if (!ratio) throw DomainError(ErrorCode::bad_param_count, "--kind " + kind + " needs --ratio");
    return *ratio;
  };
  BoundReport report;
  if (kind == "simple2") {
    report = two_link_simple_bound(need_ratio());
  } else if (kind == "benign") {
    report = benign_bound(R);
  } else if (kind == "recurrence") {
    report = recurrence_bound(greedy ? greedy_recurrence_parameters(*greedy) : R);
  } else {
    report = lower_bound_value(need_ratio(), resolution);
  }

  std::string inputs;
  for (double v : report.inputs) inputs += (inputs.empty() ? "" : ",") + format_short(v);
  print_row(out, {"bound", "value", "inputs"});
  print_row(out, {report.name, format_short(report.value), inputs.empty() ? "-" : inputs});
  out << "formula " << report.formula << "\n";
  out << "value_exact " << format_shortest(report.value) << "\n";
  out << "gap_to_4/3 " << format_shortest(report.gap_to_four_thirds) << "\n";
  out << "below_4/3 " << (report.below_four_thirds ? "yes" : "no") << "\n";
  if (report.x1) out << "x1 " << format_shortest(*report.x1) << "\n";
  if (report.r_star) out << "r_star " << format_shortest(*report.r_star) << "\n";
  return kExitOk;
}

int cmd_verify(std::ostream& out, const std::vector<std::string>& command, const std::string& suite,
               std::uint64_t seed, const std::string& out_dir, double tol) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());

  const auto results = run_suite(suite, seed, tol);
  bool all = true;
  std::string report;
  for (const auto& r : results) {
    report += std::string(r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail + "\n";
    all = all && r.passed;
  }
  out << report;
  out << (all ? "all properties passed" : "some properties failed") << "\n";

  RunManifest manifest;
  manifest.command_line = command;
  manifest.tolerance = tol;
  const auto report_path = (std::filesystem::path(out_dir) / ("verify-" + suite + ".txt")).string();
  const auto manifest_path = (std::filesystem::path(out_dir) / "manifest.json").string();
  write_file(report_path, report);
  manifest.outputs = {report_path, manifest_path};
  manifest.timestamp = utc_timestamp();
  write_file(manifest_path, manifest.to_json());
  out << "wrote " << manifest_path << "\n";
  return all ? kExitOk : kExitVerifyFailed;
}

int cmd_mechanism(std::ostream& out, const std::string& network_file, const std::string& kind,
                  const std::vector<double>& R, std::optional<double> x1, std::optional<double> x2,
                  const std::string& out_path) {
  const auto net = parse_network(read_file(network_file));
  MechanismSpec spec;
  spec.kind = kind == "threshold" ? MechanismSpec::Kind::threshold : MechanismSpec::Kind::plateau;
  spec.R = R;
  if (x1.has_value() != x2.has_value()) throw DomainError(ErrorCode::bad_param_count, "give both --x1 and --x2");
  spec.x1 = x1;
  spec.x2 = x2;
  const std::string text = mechanism_to_json(resolve_mechanism(net, spec));
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
    out << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria and price-of-anarchy bounds for parallel-link routing", "anarchy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string network_file, mechanism_file, which = "nash", csv_path, svg_path, kind, suite = "core", out_dir = ".";
  std::string out_path;
  double rate = 0.0;
  std::optional<double> rmax, ratio, x1, x2;
  std::optional<std::size_t> greedy;
  std::size_t samples = 200, resolution = 2001;
  std::uint64_t seed = 7;
  std::vector<double> R;

  auto* solve = app.add_subcommand("solve", "Nash, optimal or modified-Nash flow at one rate");
  solve->add_option("network", network_file, "network JSON file")->required();
  solve->add_option("--rate", rate, "total demand")->required();
  solve->add_option("--which", which, "nash, opt or mn")->check(CLI::IsMember({"nash", "opt", "mn"}));
  solve->add_option("--mechanism", mechanism_file, "mechanism JSON file");

  auto* curve = app.add_subcommand("curve", "Ratio curve as CSV (and optionally SVG)");
  curve->add_option("network", network_file, "network JSON file")->required();
  curve->add_option("--mechanism", mechanism_file, "mechanism JSON file");
  curve->add_option("--rmax", rmax, "largest grid rate");
  curve->add_option("--samples", samples, "grid size");
  curve->add_option("--csv", csv_path, "CSV output path")->required();
  curve->add_option("--svg", svg_path, "SVG output path");

  auto* bounds = app.add_subcommand("bounds", "Closed-form and recurrence bounds");
  bounds->add_option("--kind", kind, "simple2, benign, recurrence or lower")
      ->required()
      ->check(CLI::IsMember({"simple2", "benign", "recurrence", "lower"}));
  bounds->add_option("--R", R, "parameter list")->delimiter(',');
  bounds->add_option("--ratio", ratio, "two-link slope ratio R = a1/a2");
  bounds->add_option("--greedy", greedy, "recurrence: use greedy parameters for k links");
  bounds->add_option("--resolution", resolution, "lower: outer grid size");

  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("--suite", suite, "core, paper or random")->check(CLI::IsMember({"core", "paper", "random"}));
  verify->add_option("--seed", seed, "random suite seed");
  verify->add_option("--out", out_dir, "directory for the report and manifest");

  auto* mechanism = app.add_subcommand("mechanism", "Build a mechanism file with its derived fields");
  mechanism->add_option("network", network_file, "network JSON file")->required();
  mechanism->add_option("--kind", kind, "threshold or plateau")
      ->required()
      ->check(CLI::IsMember({"threshold", "plateau"}));
  mechanism->add_option("--R", R, "threshold parameters")->delimiter(',');
  mechanism->add_option("--x1", x1, "plateau start");
  mechanism->add_option("--x2", x2, "plateau end");
  mechanism->add_option("--out", out_path, "output path (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitParse;
  }

  std::vector<std::string> command{"anarchy"};
  command.insert(command.end(), args.begin(), args.end());
  try {
    const double tol = tolerance_from_env();
    if (*solve) return cmd_solve(out, network_file, mechanism_file, rate, which);
    if (*curve) return cmd_curve(out, command, network_file, mechanism_file, rmax, samples, csv_path, svg_path, tol);
    if (*bounds) return cmd_bounds(out, kind, R, ratio, greedy, resolution);
    if (*verify) return cmd_verify(out, command, suite, seed, out_dir, tol);
    return cmd_mechanism(out, network_file, kind, R, x1, x2, out_path);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace anarchy
