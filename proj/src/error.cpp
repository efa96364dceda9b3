#include "roe/error.hpp"

namespace roe {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MetricViolation: return "MetricViolation";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::UnknownPoint: return "UnknownPoint";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorCode::OverlappingSupports: return "OverlappingSupports";
    case ErrorCode::NotBijective: return "NotBijective";
    case ErrorCode::NonUnitPhase: return "NonUnitPhase";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::NoFeasibleEps: return "NoFeasibleEps";
    case ErrorCode::HallFailed: return "HallFailed";
    case ErrorCode::ExtractionFailed: return "ExtractionFailed";
    case ErrorCode::CertificateInvalid: return "CertificateInvalid";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace roe
