#pragma once

#include <stdexcept>
#include <string>

namespace sobocert {

enum class ErrorCode {
  NonPositiveMeasure,
  DuplicateEdge,
  SelfLoop,
  IndexOutOfRange,
  EmptyGraph,
  NoEdges,
  Disconnected,
  DegenerateOrder,
  OrderingViolated,
  NuNotAbovePorder,
  EmptyLevel,
  KappaOutOfRange,
  PieceDisconnected,
  DimensionTooLow,
  StepFailure,
  WindowEmpty,
  NonPositiveField,
  KindUnsupported,
  MOutOfRange,
  MissingRho,
  InvalidS,
  ConfigInvalid,
  IoError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

/// All library failures are reported through this exception; `code()`
/// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveMeasure: return "NonPositiveMeasure";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DegenerateOrder: return "DegenerateOrder";
    case ErrorCode::OrderingViolated: return "OrderingViolated";
    case ErrorCode::NuNotAbovePorder: return "NuNotAbovePorder";
    case ErrorCode::EmptyLevel: return "EmptyLevel";
    case ErrorCode::KappaOutOfRange: return "KappaOutOfRange";
    case ErrorCode::PieceDisconnected: return "PieceDisconnected";
    case ErrorCode::DimensionTooLow: return "DimensionTooLow";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::NonPositiveField: return "NonPositiveField";
    case ErrorCode::KindUnsupported: return "KindUnsupported";
    case ErrorCode::MOutOfRange: return "MOutOfRange";
    case ErrorCode::MissingRho: return "MissingRho";
    case ErrorCode::InvalidS: return "InvalidS";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace sobocert
