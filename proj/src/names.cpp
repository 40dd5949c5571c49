#include "hkl/names.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hkl {

namespace {
constexpr std::array<std::string_view, 23> kKeywords = {
    "signature", "structure", "module", "system", "sorts",  "set",   "const", "fn",
    "injective", "partial",   "total",  "left",   "right",  "net",   "place", "transition",
    "init",      "guard",     "arc",    "var",    "elm",    "true",  "false"};
}

bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto c0 = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(c0) || c0 == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

bool is_number(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

std::string quote_name(std::string_view s) {
  if ((is_identifier(s) && !is_keyword(s)) || is_number(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace hkl
