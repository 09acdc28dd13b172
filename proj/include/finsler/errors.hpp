#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finsler {

enum class ErrorCode {
  DivisionNearZero,
  SqrtNonPositive,
  LogNonPositive,
  OrderOutOfRange,
  IncompatibleJets,
  MaxDepthExceeded,
  SingularFrame,
  IntegrandSingularOnPath,
  NonPositivePhi,
  MetricUnavailable,
  ZeroVector,
  DimensionMismatch,
  StencilCrossesSingularSet,
  InvalidParameters,
  ParseError,
  ValidationError,
  EmptyGridAfterGuards,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionNearZero: return "DivisionNearZero";
    case ErrorCode::SqrtNonPositive: return "SqrtNonPositive";
    case ErrorCode::LogNonPositive: return "LogNonPositive";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::IncompatibleJets: return "IncompatibleJets";
    case ErrorCode::MaxDepthExceeded: return "MaxDepthExceeded";
    case ErrorCode::SingularFrame: return "SingularFrame";
    case ErrorCode::IntegrandSingularOnPath: return "IntegrandSingularOnPath";
    case ErrorCode::NonPositivePhi: return "NonPositivePhi";
    case ErrorCode::MetricUnavailable: return "MetricUnavailable";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::StencilCrossesSingularSet: return "StencilCrossesSingularSet";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::EmptyGridAfterGuards: return "EmptyGridAfterGuards";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace finsler
