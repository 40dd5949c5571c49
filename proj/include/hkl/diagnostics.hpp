#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hkl {

enum class Severity { Error, Warning, Note };

struct SourceLocation {
  std::string file;
  int line = 0;
  int column = 0;

  bool valid() const { return line > 0; }
  bool operator==(const SourceLocation&) const = default;
};

/// A reported problem. `code` is a stable machine-readable kind such as
/// "duplicate-name" or "injectivity"; `subject` names the offending symbol.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string subject;
  std::string message;
  SourceLocation location;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);
std::size_t count_code(const Diagnostics& diags, const std::string& code);
std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

}  // namespace hkl
