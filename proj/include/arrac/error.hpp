#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arrac {

enum class ErrorCode {
  ArityMismatch,
  BadArity,
  InvalidValue,
  ConsistencyViolation,
  PredicateArity,
  BadPredicate,
  NotInjective,
  BadStep,
  NotInvertible,
  NotDisjoint,
  NotExhaustive,
  NotTupleValued,
  BadSlices,
  NotPushable,
  FragmentMismatch,
  SchemaMismatch,
  DuplicateKey,
  MissingCell,
  UnknownLabel,
  ParseError,
  UnboundName,
  ArityError,
  TypeError,
  FormatError,
  IoError,
};

inline std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::BadArity: return "BadArity";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::ConsistencyViolation: return "ConsistencyViolation";
    case ErrorCode::PredicateArity: return "PredicateArity";
    case ErrorCode::BadPredicate: return "BadPredicate";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::BadStep: return "BadStep";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::NotExhaustive: return "NotExhaustive";
    case ErrorCode::NotTupleValued: return "NotTupleValued";
    case ErrorCode::BadSlices: return "BadSlices";
    case ErrorCode::NotPushable: return "NotPushable";
    case ErrorCode::FragmentMismatch: return "FragmentMismatch";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnboundName: return "UnboundName";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Line/column in a source text, both 1-based.
struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

/// Half-open character range of an expression in query text.
struct SourceSpan {
  SourceLocation begin;
  SourceLocation end;
};

/// The single exception type thrown by the library.
///
/// `witness()` carries the offending index coordinates when the failure is
/// about a particular association (a union conflict, a collapsed index, a
/// missing table cell). `location()` is set for parse and format errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::vector<std::int64_t>> witness = std::nullopt,
        std::optional<SourceLocation> location = std::nullopt)
      : std::runtime_error(std::string(errorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message),
        witness_(std::move(witness)),
        location_(location) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::optional<std::vector<std::int64_t>>& witness() const noexcept { return witness_; }
  const std::optional<SourceLocation>& location() const noexcept { return location_; }

  const std::optional<SourceSpan>& span() const noexcept { return span_; }
  void setSpan(SourceSpan span) { span_ = span; }

  /// Parse errors: the tokens that would have been accepted.
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  void setExpected(std::vector<std::string> expected) { expected_ = std::move(expected); }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::vector<std::int64_t>> witness_;
  std::optional<SourceLocation> location_;
  std::optional<SourceSpan> span_;
  std::vector<std::string> expected_;
};

}  // namespace arrac
