#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hkl {

enum class ErrorCode {
  UnboundVariable,
  SortMismatch,
  UnknownSymbol,
  KindMismatch,
  DuplicateLabel,
  RenamingCollision,
  InscriptionMismatch,
  InvalidModule,
  InvalidSchema,
  SignatureMismatch,
  InvalidStructure,
  NotEnabled,
  BoundExceeded,
  UnknownToken,
  CycleIntroduced,
  OccurrenceViolation,
  CapExceeded,
  DimensionMismatch,
  ZeroInvariant,
  Format,
};

std::string_view to_string(ErrorCode code);

/// Engine error. Every operation that can fail throws this with a code
/// naming the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hkl
