#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anarchy/analysis.hpp"
#include "anarchy/network.hpp"

namespace anarchy {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct CurveRow {
  CurveSample sample;
  std::string regime;        // "seg<n>", or "tail" for the r = inf row
  bool right_limit = false;  // sampled just right of a jump
};

struct CurveArtifact {
  std::vector<CurveRow> rows;  // ascending r; the tail row is last
  std::vector<double> breakpoints;
  double rmax = 0.0;
};

// max(2 r_k, 2 r**), or 1 when the network has no structure.
double default_rmax(const ParallelNetwork& net, const Modification& mod);

// Grid rmax*(i+1)/samples, structural breakpoints up to rmax, right limits
// r*(1 + 1e-12) at jumps, and a tail row. Throws DomainError for
// samples < 2 or rmax <= 0.
CurveArtifact build_curve(const ParallelNetwork& net, const Modification& mod, double rmax, std::size_t samples,
                          double tol = 1e-9);

// Shortest representation that reads back to the same double.
std::string format_shortest(double value);
// Six significant digits, for console tables.
std::string format_short(double value);

std::string curve_to_csv(const CurveArtifact& curve);
std::vector<CurveRow> parse_curve_csv(std::string_view text);
std::string curve_to_svg(const CurveArtifact& curve);

struct RunManifest {
  std::vector<std::string> command_line;
  struct Input {
    std::string path;
    std::string sha256;
    std::size_t bytes = 0;
  };
  std::vector<Input> inputs;
  std::string timestamp;
  std::vector<std::string> outputs;
  double tolerance = 1e-9;

  void add_input(std::string path, std::string_view bytes);
  std::string to_json() const;
};

std::string utc_timestamp();

}  // namespace anarchy
