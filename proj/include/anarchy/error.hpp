#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anarchy {

enum class ErrorCode {
  empty_network,
  zero_slope_not_last,
  negative_coefficient,
  non_finite_coefficient,
  negative_rate,
  segment_mismatch,
  infeasible_rate,
  too_many_links,
  bad_param_count,
  param_too_small,
  not_two_links,
  param_out_of_range,
  ratio_too_small,
  ratio_out_of_range,
  not_continuous_at_equilibrium,
  invalid_latency,
  unsupported,
};

std::string_view to_string(ErrorCode code) noexcept;

// Raised when an operation's domain precondition does not hold.
class DomainError : public std::runtime_error {
 public:
  DomainError(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace anarchy
