#ifndef PHASEMIX_ERROR_HPP
#define PHASEMIX_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace phasemix {

enum class ErrorCode {
  // model validation (CLI exit status 2)
  NonStochasticInitial,
  NotSubIntensity,
  InvalidScaler,
  InvalidArgument,
  DomainError,
  ParseError,
  // numerical failures (CLI exit status 3)
  MatexpFailure,
  SingularMatrix,
  ComplexSpectrum,
  DefectiveDecompositionFailure,
  QuadratureNonconvergence,
  TruncationBoundViolated,
  UnimodalityCheckFailed,
  PrecisionLoss,
  NotRegularlyVarying,
  NotFrechet,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStochasticInitial: return "NonStochasticInitial";
    case ErrorCode::NotSubIntensity: return "NotSubIntensity";
    case ErrorCode::InvalidScaler: return "InvalidScaler";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MatexpFailure: return "MatexpFailure";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorCode::DefectiveDecompositionFailure: return "DefectiveDecompositionFailure";
    case ErrorCode::QuadratureNonconvergence: return "QuadratureNonconvergence";
    case ErrorCode::TruncationBoundViolated: return "TruncationBoundViolated";
    case ErrorCode::UnimodalityCheckFailed: return "UnimodalityCheckFailed";
    case ErrorCode::PrecisionLoss: return "PrecisionLoss";
    case ErrorCode::NotRegularlyVarying: return "NotRegularlyVarying";
    case ErrorCode::NotFrechet: return "NotFrechet";
  }
  return "Unknown";
}

/// True for errors caused by a bad model or argument rather than by numerics.
constexpr bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStochasticInitial:
    case ErrorCode::NotSubIntensity:
    case ErrorCode::InvalidScaler:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DomainError:
    case ErrorCode::ParseError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phasemix

#endif  // PHASEMIX_ERROR_HPP
