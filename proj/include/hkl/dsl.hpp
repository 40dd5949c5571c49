#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hkl/calculus.hpp"
#include "hkl/diagnostics.hpp"
#include "hkl/signatures.hpp"

namespace hkl::dsl {

struct SourceFile {
  std::string path;
  std::string text;
};

/// Composition expression over module names; a leaf names a module, an
/// inner node composes its two operands left-to-right.
struct SystemExpr {
  std::string module;
  std::vector<SystemExpr> operands;  // empty or exactly two

  bool is_leaf() const { return operands.empty(); }
  std::vector<std::string> module_names() const;
  bool operator==(const SystemExpr& other) const;
};

struct SystemDecl {
  std::string name;
  SystemExpr expr;
  bool operator==(const SystemDecl&) const = default;
};

/// Fully resolved declarations of one or more .hkl files.
struct ModelSet {
  std::vector<SignaturePtr> signatures;
  std::vector<StructurePtr> structures;
  std::vector<Module> modules;
  std::vector<SystemDecl> systems;

  SignaturePtr find_signature(const std::string& name) const;
  StructurePtr find_structure(const std::string& name) const;
  const Module* find_module(const std::string& name) const;
  const SystemDecl* find_system(const std::string& name) const;

  bool empty() const;
  bool operator==(const ModelSet& other) const;
};

struct ParseResult {
  /// Present only when `diagnostics` holds no error.
  std::optional<ModelSet> model;
  Diagnostics diagnostics;
};

/// Total: never throws on malformed input, always reports diagnostics.
ParseResult parse(const std::vector<SourceFile>& files);
ParseResult parse(const std::string& text, const std::string& path = "<input>");

/// Canonical text: signatures, structures, modules, systems, in that order.
/// Throws Error{Format} for modules whose interior is an instance or a run.
std::string pretty_print(const ModelSet& model);

/// Composes the modules of a system expression.
Module evaluate_system(const ModelSet& model, const SystemExpr& expr);

enum class TokenKind {
  Identifier,
  Number,
  String,
  Punct,
  Invalid,
  End,
};

struct Token {
  TokenKind kind;
  std::string text;  // decoded text for strings
  SourceLocation location;
  std::size_t offset = 0;  // byte offset of the lexeme
  std::size_t length = 0;  // byte length of the lexeme
};

/// Lexes a source file; invalid characters become Invalid tokens.
std::vector<Token> tokenize(const std::string& text, const std::string& path = "<input>");

}  // namespace hkl::dsl
