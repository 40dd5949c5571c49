#include <cctype>
#include <string_view>

#include "hkl/dsl.hpp"

namespace hkl::dsl {

namespace {

constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022, composition operator

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(const std::string& text, const std::string& path) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
        ++col;  // count code points, not continuation bytes
      }
    }
  };
  auto emit = [&](TokenKind kind, std::string t, SourceLocation loc, std::size_t start) {
    out.push_back(Token{kind, std::move(t), std::move(loc), start, i - start});
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourceLocation loc{path, line, col};
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) advance(1);
      emit(TokenKind::Identifier, text.substr(start, i - start), loc, start);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) advance(1);
      if (i < text.size() && ident_char(text[i])) {
        while (i < text.size() && ident_char(text[i])) advance(1);
        emit(TokenKind::Invalid, text.substr(start, i - start), loc, start);
      } else {
        emit(TokenKind::Number, text.substr(start, i - start), loc, start);
      }
    } else if (c == '"') {
      advance(1);
      std::string value;
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\' && i + 1 < text.size()) {
          char e = text[i + 1];
          value += e == 'n' ? '\n' : e;
          advance(2);
          continue;
        }
        value += d;
        advance(1);
      }
      emit(closed && !value.empty() ? TokenKind::String : TokenKind::Invalid,
           closed ? value : text.substr(start, i - start), loc, start);
    } else if (text.compare(i, kBullet.size(), kBullet) == 0) {
      advance(kBullet.size());
      emit(TokenKind::Punct, ".", loc, start);
    } else {
      static constexpr std::string_view two[] = {"->", "==", "!=", "&&"};
      bool matched = false;
      for (auto op : two)
        if (text.compare(i, 2, op) == 0) {
          advance(2);
          emit(TokenKind::Punct, std::string(op), loc, start);
          matched = true;
          break;
        }
      if (matched) continue;
      static constexpr std::string_view one = "{}();,:=.";
      if (one.find(c) != std::string_view::npos) {
        advance(1);
        emit(TokenKind::Punct, std::string(1, c), loc, start);
      } else {
        // Swallow a whole UTF-8 sequence as one invalid token.
        std::size_t len = 1;
        auto u = static_cast<unsigned char>(c);
        if (u >= 0xF0) len = 4;
        else if (u >= 0xE0) len = 3;
        else if (u >= 0xC0) len = 2;
        advance(len);
        emit(TokenKind::Invalid, text.substr(start, i - start), loc, start);
      }
    }
  }
  out.push_back(Token{TokenKind::End, "", SourceLocation{path, line, col}, text.size(), 0});
  return out;
}

}  // namespace hkl::dsl
