#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anarchy/analysis.hpp"
#include "anarchy/network.hpp"

namespace anarchy {

// Malformed or schema-violating input file. Line and column are 1-based and
// point at (or just past) the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);

// {"links": [{"a": number, "b": number}, ...]}; the result is normalized.
ParallelNetwork parse_network(std::string_view text);
std::string network_to_json(const ParallelNetwork& net);

// {"kind": "threshold", "R": [...]} or {"kind": "plateau", "x1": n, "x2": n}.
// A plateau file without x1/x2 asks for the balanced parameters. Other keys
// (derived fields written by the tool) are ignored.
struct MechanismSpec {
  enum class Kind { threshold, plateau };
  Kind kind = Kind::threshold;
  std::vector<double> R;
  std::optional<double> x1;
  std::optional<double> x2;
};

MechanismSpec parse_mechanism(std::string_view text);
Modification resolve_mechanism(const ParallelNetwork& net, const MechanismSpec& spec);
std::string mechanism_to_json(const Modification& mod);

}  // namespace anarchy
