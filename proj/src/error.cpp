#include "wpn/error.hpp"

namespace wpn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::EnvelopeError: return "EnvelopeError";
    case ErrorCode::WeightCollapse: return "WeightCollapse";
    case ErrorCode::NoCrossover: return "NoCrossover";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace wpn
