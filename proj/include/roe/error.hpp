#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roe {

enum class ErrorCode {
  MetricViolation,
  DisconnectedGraph,
  UnknownPoint,
  DomainMismatch,
  SpaceMismatch,
  NumericalFailure,
  EmptySet,
  NonpositiveRadius,
  OverlappingSupports,
  NotBijective,
  NonUnitPhase,
  NotUnitary,
  NotInjective,
  NoFeasibleEps,
  HallFailed,
  ExtractionFailed,
  CertificateInvalid,
  InvalidParams,
  FormatError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is diagnostic text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The diagnostic text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace roe
