#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace anarchy {

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::string detail;  // witness on failure, summary on success
};

// Suites: "core" (fixtures and plumbing), "paper" (golden constants),
// "random" (seeded property sweeps). Throws std::invalid_argument otherwise.
std::vector<PropertyResult> run_suite(std::string_view suite, std::uint64_t seed, double tol);

}  // namespace anarchy
