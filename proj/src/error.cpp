#include "anarchy/error.hpp"

namespace anarchy {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::empty_network: return "EmptyNetwork";
    case ErrorCode::zero_slope_not_last: return "ZeroSlopeNotLast";
    case ErrorCode::negative_coefficient: return "NegativeCoefficient";
    case ErrorCode::non_finite_coefficient: return "NonFiniteCoefficient";
    case ErrorCode::negative_rate: return "NegativeRate";
    case ErrorCode::segment_mismatch: return "SegmentMismatch";
    case ErrorCode::infeasible_rate: return "InfeasibleRate";
    case ErrorCode::too_many_links: return "TooManyLinks";
    case ErrorCode::bad_param_count: return "BadParamCount";
    case ErrorCode::param_too_small: return "ParamTooSmall";
    case ErrorCode::not_two_links: return "NotTwoLinks";
    case ErrorCode::param_out_of_range: return "ParamOutOfRange";
    case ErrorCode::ratio_too_small: return "RatioTooSmall";
    case ErrorCode::ratio_out_of_range: return "RatioOutOfRange";
    case ErrorCode::not_continuous_at_equilibrium: return "NotContinuousAtEquilibrium";
    case ErrorCode::invalid_latency: return "InvalidLatency";
    case ErrorCode::unsupported: return "Unsupported";
  }
  return "Unknown";
}

DomainError::DomainError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace anarchy
