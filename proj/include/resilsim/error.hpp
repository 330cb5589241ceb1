#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resilsim {

/// Failure conditions raised by library operations. Data-level verdicts
/// (chain violations, solution gaps) are returned as values instead.
enum class ErrorCode {
  BenignFault,
  MaskedError,
  NegativeTime,
  DegenerateReliability,
  DivergentIntegral,
  ZeroMTTF,
  EmptyParts,
  ZeroDenominator,
  UndefinedMetric,
  EmptyLog,
  InvalidArgument,
  SchemaError,
  UnknownComponent,
  RetiredComponent,
  PartitionError,
  InsufficientHistory,
  PersistentEvent,
  AllVariantsRejected,
  ConfigError,
  TraceParseError,
  InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BenignFault: return "BenignFault";
    case ErrorCode::MaskedError: return "MaskedError";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::DegenerateReliability: return "DegenerateReliability";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::ZeroMTTF: return "ZeroMTTF";
    case ErrorCode::EmptyParts: return "EmptyParts";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::RetiredComponent: return "RetiredComponent";
    case ErrorCode::PartitionError: return "PartitionError";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::PersistentEvent: return "PersistentEvent";
    case ErrorCode::AllVariantsRejected: return "AllVariantsRejected";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TraceParseError: return "TraceParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Schema violation carrying the JSON-pointer path of the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(ErrorCode::SchemaError, path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Malformed trace input; line numbers are 1-based.
class TraceParseError : public Error {
 public:
  TraceParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::TraceParseError, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace resilsim
