#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hkl/diagnostics.hpp"

namespace hkl {

/// Carrier elements are interned symbolic names; numbers are stored by
/// their decimal spelling. Equality is string equality.
using Atom = std::string;

struct SetSymbol {
  std::string name;
  std::string sort;
  bool operator==(const SetSymbol&) const = default;
};

struct ConstantSymbol {
  std::string name;
  std::string sort;
  bool operator==(const ConstantSymbol&) const = default;
};

struct FunctionSymbol {
  std::string name;
  std::vector<std::string> argSorts;
  std::string resultSort;
  bool operator==(const FunctionSymbol&) const = default;
};

enum class RequirementKind { Injective, Total, Partial };

struct Requirement {
  RequirementKind kind;
  std::string subject;
  bool operator==(const Requirement&) const = default;
};

std::string to_string(RequirementKind kind);

/// Many-sorted vocabulary of set, constant and function symbols, plus the
/// requirements that exclude unwanted structures. Sorts and symbols share a
/// single namespace.
struct Signature {
  std::string name;
  std::vector<std::string> sorts;
  std::vector<SetSymbol> sets;
  std::vector<ConstantSymbol> constants;
  std::vector<FunctionSymbol> functions;
  std::vector<Requirement> requirements;

  bool has_sort(const std::string& s) const;
  const SetSymbol* find_set(const std::string& n) const;
  const ConstantSymbol* find_constant(const std::string& n) const;
  const FunctionSymbol* find_function(const std::string& n) const;

  bool is_injective(const std::string& fn) const;
  /// Functions are total unless a partial requirement says otherwise.
  bool is_partial(const std::string& fn) const;

  bool operator==(const Signature&) const = default;
};

using SignaturePtr = std::shared_ptr<const Signature>;

Diagnostics validate_signature(const Signature& sig);

/// Extensional function: argument tuple -> result. Absent keys are the
/// undefined points.
using FunctionTable = std::map<std::vector<Atom>, Atom>;

struct Structure {
  std::string name;
  SignaturePtr signature;
  std::map<std::string, std::set<Atom>> carriers;
  std::map<std::string, std::set<Atom>> sets;
  std::map<std::string, Atom> constants;
  std::map<std::string, FunctionTable> functions;

  const std::set<Atom>& carrier(const std::string& sort) const;

  bool operator==(const Structure& other) const;
};

using StructurePtr = std::shared_ptr<const Structure>;

Diagnostics validate_structure(const Structure& s);

/// Reserved sort of guard expressions.
inline constexpr const char* kBoolSort = "$bool";

enum class TermKind { Variable, Constant, Application, Elm, Equal, NotEqual, And };

/// Immutable, sort-checked term tree. Construct through the factory
/// functions below; they throw Error{SortMismatch|UnknownSymbol} on
/// ill-sorted input.
class Term {
 public:
  static Term variable(const std::string& name, const std::string& sort);
  static Term constant(const Signature& sig, const std::string& symbol);
  static Term apply(const Signature& sig, const std::string& fn, std::vector<Term> args);
  static Term elm(const Signature& sig, const std::string& setSymbol);
  static Term equal(Term lhs, Term rhs);
  static Term not_equal(Term lhs, Term rhs);
  /// Conjunctions are flattened, sorted and deduplicated.
  static Term conjunction(std::vector<Term> parts);

  TermKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::string& sort() const { return node_->sort; }
  const std::vector<Term>& args() const { return node_->args; }

  bool is_boolean() const { return node_->sort == kBoolSort; }
  bool contains_elm() const;

  /// Free variables with their sorts, ordered by name.
  std::map<std::string, std::string> variables() const;

  /// Replaces variables by the given terms (sorts must agree).
  Term substitute(const std::map<std::string, Term>& replacement) const;

  /// Concrete-syntax rendering, also used as a total order key.
  std::string to_string() const;

  bool operator==(const Term& other) const;
  bool operator<(const Term& other) const { return to_string() < other.to_string(); }

 private:
  struct Node {
    TermKind kind;
    std::string name;
    std::string sort;
    std::vector<Term> args;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using Valuation = std::map<std::string, Atom>;

/// Value of a term under a structure and valuation. std::nullopt means
/// UNDEFINED (a partial function applied outside its domain). Boolean terms
/// evaluate to "true" / "false". Throws UnboundVariable, SortMismatch, or
/// UnknownSymbol for Elm terms, which have no single value.
std::optional<Atom> eval_term(const Term& t, const Structure& s, const Valuation& v);

/// Guard evaluation: nullopt when some subterm is undefined.
std::optional<bool> eval_guard(const Term& t, const Structure& s, const Valuation& v);

/// The elements of a set symbol's interpretation, one token candidate each.
std::set<Atom> expand_elm(const std::string& setSymbol, const Structure& s);

std::string format_valuation(const Valuation& v);

}  // namespace hkl
