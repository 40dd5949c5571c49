#include "hkl/error.hpp"

#include "hkl/diagnostics.hpp"

#include <algorithm>

namespace hkl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::RenamingCollision: return "RenamingCollision";
    case ErrorCode::InscriptionMismatch: return "InscriptionMismatch";
    case ErrorCode::InvalidModule: return "InvalidModule";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::InvalidStructure: return "InvalidStructure";
    case ErrorCode::NotEnabled: return "NotEnabled";
    case ErrorCode::BoundExceeded: return "BoundExceeded";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::CycleIntroduced: return "CycleIntroduced";
    case ErrorCode::OccurrenceViolation: return "OccurrenceViolation";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroInvariant: return "ZeroInvariant";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::size_t count_code(const Diagnostics& diags, const std::string& code) {
  return static_cast<std::size_t>(std::count_if(
      diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  if (d.location.valid()) {
    os << (d.location.file.empty() ? "<input>" : d.location.file) << ':' << d.location.line
       << ':' << d.location.column << ": ";
  }
  switch (d.severity) {
    case Severity::Error: os << "error"; break;
    case Severity::Warning: os << "warning"; break;
    case Severity::Note: os << "note"; break;
  }
  os << " [" << d.code << "] " << d.message;
  return os;
}

}  // namespace hkl
