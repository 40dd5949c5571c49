#pragma once

#include <random>
#include <string>
#include <vector>

#include "hkl/dsl.hpp"

namespace test {

/// Single-token corruptions of a source text.
enum class Corruption { DeletePunct, NameToPunct, SwapPunct, InsertStray };

inline const std::vector<std::string>& puncts() {
  static const std::vector<std::string> p = {"{", "}", "(", ")", ";", ",", ":", "=", ".", "->", "==", "!=", "&&"};
  return p;
}

inline const std::vector<std::string>& strays() {
  static const std::vector<std::string> s = {"$", "@", "#", "?", "~", "`", "^", "%", "\xC2\xA7"};
  return s;
}

struct Mutation {
  Corruption kind;
  std::size_t token;
  std::size_t choice;
};

inline bool applicable(const hkl::dsl::Token& t, Corruption c) {
  using hkl::dsl::TokenKind;
  switch (c) {
    case Corruption::DeletePunct:
    case Corruption::SwapPunct:
      return t.kind == TokenKind::Punct;
    case Corruption::NameToPunct:
      return t.kind == TokenKind::Identifier || t.kind == TokenKind::Number || t.kind == TokenKind::String;
    case Corruption::InsertStray:
      return t.kind != TokenKind::End;
  }
  return false;
}

inline std::string apply(const std::string& text, const std::vector<hkl::dsl::Token>& toks, const Mutation& m) {
  const auto& t = toks[m.token];
  std::string out = text;
  switch (m.kind) {
    case Corruption::DeletePunct:
      out.replace(t.offset, t.length, " ");
      break;
    case Corruption::NameToPunct:
      out.replace(t.offset, t.length, puncts()[m.choice % puncts().size()]);
      break;
    case Corruption::SwapPunct: {
      // pick a punctuation different from the original
      std::vector<std::string> others;
      for (const auto& p : puncts())
        if (p != t.text) others.push_back(p);
      out.replace(t.offset, t.length, others[m.choice % others.size()]);
      break;
    }
    case Corruption::InsertStray:
      out.insert(t.offset, strays()[m.choice % strays().size()]);
      break;
  }
  return out;
}

/// Uniform random mutation; the token is uniform among applicable ones.
inline Mutation random_mutation(const std::vector<hkl::dsl::Token>& toks, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3);
  for (;;) {
    Corruption c = static_cast<Corruption>(kind(rng));
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < toks.size(); ++i)
      if (applicable(toks[i], c)) candidates.push_back(i);
    if (candidates.empty()) continue;
    std::size_t tok = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    return {c, tok, std::uniform_int_distribution<std::size_t>(0, 63)(rng)};
  }
}

}  // namespace test
