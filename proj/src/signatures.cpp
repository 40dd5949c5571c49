#include "hkl/signatures.hpp"

#include <algorithm>
#include <sstream>

#include "hkl/error.hpp"
#include "hkl/names.hpp"

namespace hkl {

std::string to_string(RequirementKind kind) {
  switch (kind) {
    case RequirementKind::Injective: return "injective";
    case RequirementKind::Total: return "total";
    case RequirementKind::Partial: return "partial";
  }
  return "?";
}

bool Signature::has_sort(const std::string& s) const {
  return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
}

const SetSymbol* Signature::find_set(const std::string& n) const {
  auto it = std::find_if(sets.begin(), sets.end(), [&](const auto& x) { return x.name == n; });
  return it == sets.end() ? nullptr : &*it;
}

const ConstantSymbol* Signature::find_constant(const std::string& n) const {
  auto it = std::find_if(constants.begin(), constants.end(),
                         [&](const auto& x) { return x.name == n; });
  return it == constants.end() ? nullptr : &*it;
}

const FunctionSymbol* Signature::find_function(const std::string& n) const {
  auto it = std::find_if(functions.begin(), functions.end(),
                         [&](const auto& x) { return x.name == n; });
  return it == functions.end() ? nullptr : &*it;
}

bool Signature::is_injective(const std::string& fn) const {
  return std::any_of(requirements.begin(), requirements.end(), [&](const Requirement& r) {
    return r.subject == fn && r.kind == RequirementKind::Injective;
  });
}

bool Signature::is_partial(const std::string& fn) const {
  return std::any_of(requirements.begin(), requirements.end(), [&](const Requirement& r) {
    return r.subject == fn && r.kind == RequirementKind::Partial;
  });
}

namespace {

Diagnostic diag(std::string code, std::string subject, std::string message) {
  return Diagnostic{Severity::Error, std::move(code), std::move(subject), std::move(message), {}};
}

std::string join_atoms(const std::vector<Atom>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

}  // namespace

Diagnostics validate_signature(const Signature& sig) {
  Diagnostics out;
  std::set<std::string> seen;
  auto claim = [&](const std::string& n, const char* what) {
    if (!seen.insert(n).second)
      out.push_back(diag("duplicate-name", n, std::string("duplicate ") + what + " name '" + n + "'"));
  };
  auto need_sort = [&](const std::string& symbol, const std::string& s) {
    if (!sig.has_sort(s))
      out.push_back(diag("undeclared-sort", symbol,
                         "symbol '" + symbol + "' refers to undeclared sort '" + s + "'"));
  };

  for (const auto& s : sig.sorts) claim(s, "sort");
  for (const auto& s : sig.sets) {
    claim(s.name, "set symbol");
    need_sort(s.name, s.sort);
  }
  for (const auto& c : sig.constants) {
    claim(c.name, "constant symbol");
    need_sort(c.name, c.sort);
  }
  for (const auto& f : sig.functions) {
    claim(f.name, "function symbol");
    for (const auto& a : f.argSorts) need_sort(f.name, a);
    need_sort(f.name, f.resultSort);
  }

  std::map<std::string, int> totality_marks;
  std::map<std::string, int> injective_marks;
  for (const auto& r : sig.requirements) {
    if (!sig.find_function(r.subject)) {
      out.push_back(diag("unknown-requirement-subject", r.subject,
                         to_string(r.kind) + " requirement on undeclared function '" + r.subject + "'"));
      continue;
    }
    if (r.kind == RequirementKind::Injective) {
      if (++injective_marks[r.subject] == 2)
        out.push_back(diag("conflicting-requirement", r.subject,
                           "function '" + r.subject + "' is marked injective twice"));
    } else if (++totality_marks[r.subject] == 2) {
      out.push_back(diag("conflicting-requirement", r.subject,
                         "function '" + r.subject + "' is marked total/partial more than once"));
    }
  }
  return out;
}

const std::set<Atom>& Structure::carrier(const std::string& sort) const {
  static const std::set<Atom> empty;
  auto it = carriers.find(sort);
  return it == carriers.end() ? empty : it->second;
}

bool Structure::operator==(const Structure& other) const {
  bool same_sig = signature == other.signature ||
                  (signature && other.signature && *signature == *other.signature);
  return same_sig && name == other.name && carriers == other.carriers && sets == other.sets &&
         constants == other.constants && functions == other.functions;
}

namespace {

void cartesian(const std::vector<const std::set<Atom>*>& domains, std::size_t i,
               std::vector<Atom>& cur, std::vector<std::vector<Atom>>& out) {
  if (i == domains.size()) {
    out.push_back(cur);
    return;
  }
  for (const auto& a : *domains[i]) {
    cur.push_back(a);
    cartesian(domains, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Diagnostics validate_structure(const Structure& s) {
  Diagnostics out;
  if (!s.signature) {
    out.push_back(diag("missing-signature", s.name, "structure has no signature"));
    return out;
  }
  const Signature& sig = *s.signature;

  for (const auto& sort : sig.sorts)
    if (!s.carriers.count(sort))
      out.push_back(diag("uninterpreted", sort, "sort '" + sort + "' has no carrier"));
  for (const auto& [sort, _] : s.carriers)
    if (!sig.has_sort(sort))
      out.push_back(diag("unknown-symbol", sort, "carrier given for undeclared sort '" + sort + "'"));

  for (const auto& sym : sig.sets) {
    auto it = s.sets.find(sym.name);
    if (it == s.sets.end()) {
      out.push_back(diag("uninterpreted", sym.name, "set symbol '" + sym.name + "' is not interpreted"));
      continue;
    }
    const auto& carrier = s.carrier(sym.sort);
    for (const auto& a : it->second)
      if (!carrier.count(a))
        out.push_back(diag("sort", sym.name,
                           "element '" + a + "' of set '" + sym.name + "' is not in carrier of " + sym.sort));
  }
  for (const auto& [n, _] : s.sets)
    if (!sig.find_set(n))
      out.push_back(diag("unknown-symbol", n, "interpretation of undeclared set symbol '" + n + "'"));

  for (const auto& sym : sig.constants) {
    auto it = s.constants.find(sym.name);
    if (it == s.constants.end()) {
      out.push_back(diag("uninterpreted", sym.name, "constant '" + sym.name + "' is not interpreted"));
    } else if (!s.carrier(sym.sort).count(it->second)) {
      out.push_back(diag("sort", sym.name,
                         "constant '" + sym.name + "' = '" + it->second + "' is not in carrier of " + sym.sort));
    }
  }
  for (const auto& [n, _] : s.constants)
    if (!sig.find_constant(n))
      out.push_back(diag("unknown-symbol", n, "interpretation of undeclared constant '" + n + "'"));

  for (const auto& fn : sig.functions) {
    auto it = s.functions.find(fn.name);
    if (it == s.functions.end()) {
      out.push_back(diag("uninterpreted", fn.name, "function '" + fn.name + "' is not interpreted"));
      continue;
    }
    const FunctionTable& table = it->second;
    const auto& result_carrier = s.carrier(fn.resultSort);

    bool sort_ok = true;
    for (const auto& [args, result] : table) {
      bool args_ok = args.size() == fn.argSorts.size();
      for (std::size_t i = 0; args_ok && i < args.size(); ++i)
        args_ok = s.carrier(fn.argSorts[i]).count(args[i]) > 0;
      if (!args_ok || !result_carrier.count(result)) {
        sort_ok = false;
        out.push_back(diag("sort", fn.name,
                           "'" + fn.name + "(" + join_atoms(args) + ") = " + result +
                               "' does not respect the declared sorts"));
      }
    }
    if (!sort_ok) continue;

    if (sig.is_injective(fn.name)) {
      std::map<Atom, std::vector<std::vector<Atom>>> preimages;
      for (const auto& [args, result] : table) preimages[result].push_back(args);
      std::string clashes;
      for (const auto& [result, pre] : preimages) {
        if (pre.size() < 2) continue;
        if (!clashes.empty()) clashes += "; ";
        clashes += result + " has " + std::to_string(pre.size()) + " preimages";
      }
      if (!clashes.empty())
        out.push_back(diag("injectivity", fn.name,
                           "function '" + fn.name + "' is required injective but " + clashes));
    }

    if (!sig.is_partial(fn.name)) {
      std::vector<const std::set<Atom>*> domains;
      for (const auto& a : fn.argSorts) domains.push_back(&s.carrier(a));
      std::vector<std::vector<Atom>> points;
      std::vector<Atom> cur;
      cartesian(domains, 0, cur, points);
      std::vector<std::string> missing;
      for (const auto& p : points)
        if (!table.count(p)) missing.push_back("(" + join_atoms(p) + ")");
      if (!missing.empty())
        out.push_back(diag("totality", fn.name,
                           "function '" + fn.name + "' is required total but undefined at " +
                               join_atoms(missing)));
    }
  }
  for (const auto& [n, _] : s.functions)
    if (!sig.find_function(n))
      out.push_back(diag("unknown-symbol", n, "interpretation of undeclared function '" + n + "'"));
  return out;
}

// ---------------------------------------------------------------------------
// Terms

Term Term::variable(const std::string& name, const std::string& sort) {
  if (name.empty()) throw Error(ErrorCode::UnknownSymbol, "variable without a name");
  if (sort.empty() || sort == kBoolSort)
    throw Error(ErrorCode::SortMismatch, "variable '" + name + "' needs a carrier sort");
  return Term(std::make_shared<const Node>(Node{TermKind::Variable, name, sort, {}}));
}

Term Term::constant(const Signature& sig, const std::string& symbol) {
  const auto* c = sig.find_constant(symbol);
  if (!c) throw Error(ErrorCode::UnknownSymbol, "no constant symbol '" + symbol + "'");
  return Term(std::make_shared<const Node>(Node{TermKind::Constant, symbol, c->sort, {}}));
}

Term Term::apply(const Signature& sig, const std::string& fn, std::vector<Term> args) {
  const auto* f = sig.find_function(fn);
  if (!f) throw Error(ErrorCode::UnknownSymbol, "no function symbol '" + fn + "'");
  if (args.size() != f->argSorts.size())
    throw Error(ErrorCode::SortMismatch, "'" + fn + "' expects " +
                                             std::to_string(f->argSorts.size()) + " argument(s), got " +
                                             std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].sort() != f->argSorts[i])
      throw Error(ErrorCode::SortMismatch, "argument " + std::to_string(i + 1) + " of '" + fn +
                                               "' has sort " + args[i].sort() + ", expected " +
                                               f->argSorts[i]);
  return Term(std::make_shared<const Node>(
      Node{TermKind::Application, fn, f->resultSort, std::move(args)}));
}

Term Term::elm(const Signature& sig, const std::string& setSymbol) {
  const auto* s = sig.find_set(setSymbol);
  if (!s) throw Error(ErrorCode::UnknownSymbol, "no set symbol '" + setSymbol + "'");
  return Term(std::make_shared<const Node>(Node{TermKind::Elm, setSymbol, s->sort, {}}));
}

namespace {
void require_comparable(const Term& a, const Term& b) {
  if (a.is_boolean() || b.is_boolean() || a.contains_elm() || b.contains_elm())
    throw Error(ErrorCode::SortMismatch, "only carrier-valued terms can be compared");
  if (a.sort() != b.sort())
    throw Error(ErrorCode::SortMismatch,
                "comparison of sort " + a.sort() + " with sort " + b.sort());
}
}  // namespace

Term Term::equal(Term lhs, Term rhs) {
  require_comparable(lhs, rhs);
  return Term(std::make_shared<const Node>(
      Node{TermKind::Equal, "==", kBoolSort, {std::move(lhs), std::move(rhs)}}));
}

Term Term::not_equal(Term lhs, Term rhs) {
  require_comparable(lhs, rhs);
  return Term(std::make_shared<const Node>(
      Node{TermKind::NotEqual, "!=", kBoolSort, {std::move(lhs), std::move(rhs)}}));
}

Term Term::conjunction(std::vector<Term> parts) {
  std::vector<Term> flat;
  for (auto& p : parts) {
    if (!p.is_boolean()) throw Error(ErrorCode::SortMismatch, "conjunct '" + p.to_string() + "' is not a condition");
    if (p.kind() == TermKind::And)
      flat.insert(flat.end(), p.args().begin(), p.args().end());
    else
      flat.push_back(std::move(p));
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) throw Error(ErrorCode::SortMismatch, "empty conjunction");
  if (flat.size() == 1) return flat.front();
  return Term(std::make_shared<const Node>(Node{TermKind::And, "&&", kBoolSort, std::move(flat)}));
}

bool Term::contains_elm() const {
  if (kind() == TermKind::Elm) return true;
  return std::any_of(args().begin(), args().end(), [](const Term& a) { return a.contains_elm(); });
}

std::map<std::string, std::string> Term::variables() const {
  std::map<std::string, std::string> out;
  if (kind() == TermKind::Variable) out.emplace(name(), sort());
  for (const auto& a : args()) out.merge(a.variables());
  return out;
}

Term Term::substitute(const std::map<std::string, Term>& replacement) const {
  switch (kind()) {
    case TermKind::Variable: {
      auto it = replacement.find(name());
      if (it == replacement.end()) return *this;
      if (it->second.sort() != sort())
        throw Error(ErrorCode::SortMismatch, "substituting sort " + it->second.sort() + " for " +
                                                 name() + " : " + sort());
      return it->second;
    }
    case TermKind::Constant:
    case TermKind::Elm:
      return *this;
    default: {
      std::vector<Term> args2;
      for (const auto& a : args()) args2.push_back(a.substitute(replacement));
      if (kind() == TermKind::And) return conjunction(std::move(args2));
      return Term(std::make_shared<const Node>(Node{kind(), name(), sort(), std::move(args2)}));
    }
  }
}

std::string Term::to_string() const {
  switch (kind()) {
    case TermKind::Variable:
    case TermKind::Constant:
      return quote_name(name());
    case TermKind::Elm:
      return "elm(" + quote_name(name()) + ")";
    case TermKind::Application: {
      std::string out = quote_name(name()) + "(";
      for (std::size_t i = 0; i < args().size(); ++i) {
        if (i) out += ", ";
        out += args()[i].to_string();
      }
      return out + ")";
    }
    case TermKind::Equal:
    case TermKind::NotEqual:
      return args()[0].to_string() + " " + name() + " " + args()[1].to_string();
    case TermKind::And: {
      std::string out;
      for (std::size_t i = 0; i < args().size(); ++i) {
        if (i) out += " && ";
        out += args()[i].to_string();
      }
      return out;
    }
  }
  return "?";
}

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  return kind() == other.kind() && name() == other.name() && sort() == other.sort() &&
         args() == other.args();
}

std::optional<Atom> eval_term(const Term& t, const Structure& s, const Valuation& v) {
  switch (t.kind()) {
    case TermKind::Variable: {
      auto it = v.find(t.name());
      if (it == v.end()) throw Error(ErrorCode::UnboundVariable, "variable '" + t.name() + "' is unbound");
      if (!s.carrier(t.sort()).count(it->second))
        throw Error(ErrorCode::SortMismatch, "binding " + t.name() + " = " + it->second +
                                                 " is not in carrier of " + t.sort());
      return it->second;
    }
    case TermKind::Constant: {
      auto it = s.constants.find(t.name());
      if (it == s.constants.end())
        throw Error(ErrorCode::UnknownSymbol, "constant '" + t.name() + "' is not interpreted");
      return it->second;
    }
    case TermKind::Application: {
      auto fit = s.functions.find(t.name());
      if (fit == s.functions.end())
        throw Error(ErrorCode::UnknownSymbol, "function '" + t.name() + "' is not interpreted");
      std::vector<Atom> args;
      args.reserve(t.args().size());
      // Evaluate every argument first so binding errors surface even when an
      // earlier argument is undefined.
      bool undefined = false;
      for (const auto& a : t.args()) {
        auto val = eval_term(a, s, v);
        if (!val) undefined = true;
        else args.push_back(*val);
      }
      if (undefined) return std::nullopt;
      auto it = fit->second.find(args);
      if (it == fit->second.end()) return std::nullopt;
      return it->second;
    }
    case TermKind::Elm:
      throw Error(ErrorCode::SortMismatch, "elm(" + t.name() + ") denotes a set of tokens, not a value");
    case TermKind::Equal:
    case TermKind::NotEqual:
    case TermKind::And: {
      auto g = eval_guard(t, s, v);
      if (!g) return std::nullopt;
      return Atom(*g ? "true" : "false");
    }
  }
  return std::nullopt;
}

std::optional<bool> eval_guard(const Term& t, const Structure& s, const Valuation& v) {
  switch (t.kind()) {
    case TermKind::Equal:
    case TermKind::NotEqual: {
      auto a = eval_term(t.args()[0], s, v);
      auto b = eval_term(t.args()[1], s, v);
      if (!a || !b) return std::nullopt;
      return (*a == *b) == (t.kind() == TermKind::Equal);
    }
    case TermKind::And: {
      bool all = true;
      for (const auto& p : t.args()) {
        auto r = eval_guard(p, s, v);
        if (!r) return std::nullopt;
        all = all && *r;
      }
      return all;
    }
    default:
      throw Error(ErrorCode::SortMismatch, "'" + t.to_string() + "' is not a condition");
  }
}

std::set<Atom> expand_elm(const std::string& setSymbol, const Structure& s) {
  if (!s.signature || !s.signature->find_set(setSymbol))
    throw Error(ErrorCode::UnknownSymbol, "no set symbol '" + setSymbol + "'");
  auto it = s.sets.find(setSymbol);
  if (it == s.sets.end())
    throw Error(ErrorCode::UnknownSymbol, "set symbol '" + setSymbol + "' is not interpreted");
  return it->second;
}

std::string format_valuation(const Valuation& v) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [k, a] : v) {
    if (!first) os << ", ";
    first = false;
    os << k << "=" << a;
  }
  os << '}';
  return os.str();
}

}  // namespace hkl
