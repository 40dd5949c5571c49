#pragma once

#include <string>
#include <string_view>

namespace hkl {

bool is_keyword(std::string_view s);
bool is_identifier(std::string_view s);
bool is_number(std::string_view s);

/// Renders a name so the DSL lexer reads it back as a single name token.
std::string quote_name(std::string_view s);

}  // namespace hkl
