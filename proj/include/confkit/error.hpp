#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confkit {

enum class ErrorCode {
  InvalidInput,
  DegenerateFrame,
  DomainViolation,
  NotFound,
  DimensionError,
  EmptySample,
  SingularPoint,
  BadStart,
  StepCollapse,
  Unsupported,
  InvalidSurface,
  InvalidFamily,
  InvalidComplex,
  OutOfExtent,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::BadStart: return "BadStart";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::InvalidSurface: return "InvalidSurface";
    case ErrorCode::InvalidFamily: return "InvalidFamily";
    case ErrorCode::InvalidComplex: return "InvalidComplex";
    case ErrorCode::OutOfExtent: return "OutOfExtent";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above; the CLI
// maps all of them to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace confkit
