#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adagraph {

enum class ErrorCode {
  ZeroDegree,
  EmptyEdgeSet,
  InvalidGraph,
  NotSymmetric,
  DimensionTooLarge,
  SizeMismatch,
  UnsupportedDtype,
  MalformedSidecar,
  TooManySuperpixels,
  TooFewDistinctPoints,
  EditConflict,
  NonFiniteGradient,
  ConfigInvalid,
  EmptyTable,
  NoLabeledPixels,
  SingletonOnly,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroDegree: return "ZeroDegree";
    case ErrorCode::EmptyEdgeSet: return "EmptyEdgeSet";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::MalformedSidecar: return "MalformedSidecar";
    case ErrorCode::TooManySuperpixels: return "TooManySuperpixels";
    case ErrorCode::TooFewDistinctPoints: return "TooFewDistinctPoints";
    case ErrorCode::EditConflict: return "EditConflict";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::NoLabeledPixels: return "NoLabeledPixels";
    case ErrorCode::SingletonOnly: return "SingletonOnly";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adagraph
