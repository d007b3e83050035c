#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace opequiv {

enum class ErrorCode {
  DeltaOutOfRange,
  MismatchedDelta,
  BoundaryAmbiguity,
  UnsupportedTail,
  UnsupportedTailPair,
  HypothesisViolation,
  InternalInconsistency,
  InvalidSpec,
  SchemaViolation,
  NotInSupport,
  WitnessUnavailable,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::MismatchedDelta: return "MismatchedDelta";
    case ErrorCode::BoundaryAmbiguity: return "BoundaryAmbiguity";
    case ErrorCode::UnsupportedTail: return "UnsupportedTail";
    case ErrorCode::UnsupportedTailPair: return "UnsupportedTailPair";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::NotInSupport: return "NotInSupport";
    case ErrorCode::WitnessUnavailable: return "WitnessUnavailable";
  }
  return "Unknown";
}

// Library-wide exception. The code is the stable, machine-readable part; the
// message is free text for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace opequiv
