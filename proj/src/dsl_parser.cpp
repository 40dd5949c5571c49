#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "hkl/dsl.hpp"
#include "hkl/error.hpp"
#include "hkl/names.hpp"

namespace hkl::dsl {

// ---------------------------------------------------------------------------
// Model set

std::vector<std::string> SystemExpr::module_names() const {
  if (is_leaf()) return {module};
  auto out = operands[0].module_names();
  auto rhs = operands[1].module_names();
  out.insert(out.end(), rhs.begin(), rhs.end());
  return out;
}

bool SystemExpr::operator==(const SystemExpr& other) const {
  return module == other.module && operands == other.operands;
}

SignaturePtr ModelSet::find_signature(const std::string& name) const {
  for (const auto& s : signatures)
    if (s->name == name) return s;
  return nullptr;
}

StructurePtr ModelSet::find_structure(const std::string& name) const {
  for (const auto& s : structures)
    if (s->name == name) return s;
  return nullptr;
}

const Module* ModelSet::find_module(const std::string& name) const {
  for (const auto& m : modules)
    if (m.name == name) return &m;
  return nullptr;
}

const SystemDecl* ModelSet::find_system(const std::string& name) const {
  for (const auto& s : systems)
    if (s.name == name) return &s;
  return nullptr;
}

bool ModelSet::empty() const {
  return signatures.empty() && structures.empty() && modules.empty() && systems.empty();
}

bool ModelSet::operator==(const ModelSet& other) const {
  auto same_ptrs = [](const auto& xs, const auto& ys) {
    return xs.size() == ys.size() &&
           std::equal(xs.begin(), xs.end(), ys.begin(), [](const auto& x, const auto& y) { return *x == *y; });
  };
  return same_ptrs(signatures, other.signatures) && same_ptrs(structures, other.structures) &&
         modules == other.modules && systems == other.systems;
}

Module evaluate_system(const ModelSet& model, const SystemExpr& expr) {
  if (expr.is_leaf()) {
    const Module* m = model.find_module(expr.module);
    if (!m) throw Error(ErrorCode::UnknownSymbol, "no module named '" + expr.module + "'");
    return *m;
  }
  return compose(evaluate_system(model, expr.operands[0]), evaluate_system(model, expr.operands[1]));
}

namespace {

// ---------------------------------------------------------------------------
// Syntax tree

struct Name {
  std::string text;
  SourceLocation loc;
};

struct TermAst {
  enum class Kind { Ref, Call, Elm, Eq, Neq, And } kind = Kind::Ref;
  std::string name;
  SourceLocation loc;
  std::vector<TermAst> args;
};

struct SignatureAst {
  struct Symbol {
    Name name;
    Name sort;
  };
  struct Function {
    Name name;
    std::vector<Name> args;
    Name result;
    std::vector<Name> flags;
  };
  Name name;
  std::vector<Name> sorts;
  std::vector<Symbol> sets;
  std::vector<Symbol> constants;
  std::vector<Function> functions;
};

struct StructureAst {
  struct Item {
    std::vector<Name> args;
    std::optional<Name> result;
    SourceLocation loc;
  };
  struct Entry {
    Name lhs;
    bool braced = false;
    Name single;
    std::vector<Item> items;
  };
  Name name;
  Name signature;
  std::vector<Entry> entries;
};

struct ModuleAst {
  struct Element {
    ElementKind kind;
    Name label;
    std::optional<Name> sort;
    std::optional<Name> node;
  };
  struct Var {
    Name name;
    Name sort;
  };
  struct PlaceDecl {
    Name name;
    Name sort;
    std::optional<TermAst> init;
  };
  struct TransitionDecl {
    Name name;
    std::optional<TermAst> guard;
  };
  struct ArcDecl {
    Name from;
    Name to;
    TermAst inscription;
  };
  Name name;
  std::optional<Name> signature;
  std::vector<Element> left;
  std::vector<Element> right;
  bool has_net = false;
  SourceLocation net_loc;
  std::vector<Var> vars;
  std::vector<PlaceDecl> places;
  std::vector<TransitionDecl> transitions;
  std::vector<ArcDecl> arcs;
};

struct SystemExprAst {
  Name module;
  std::vector<SystemExprAst> operands;
};

struct SystemAst {
  Name name;
  SystemExprAst expr;
};

struct FileAst {
  std::vector<SignatureAst> signatures;
  std::vector<StructureAst> structures;
  std::vector<ModuleAst> modules;
  std::vector<SystemAst> systems;
};

// ---------------------------------------------------------------------------
// Parser

struct Abort {};

bool is_top_keyword(const Token& t) {
  return t.kind == TokenKind::Identifier &&
         (t.text == "signature" || t.text == "structure" || t.text == "module" || t.text == "system");
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, Diagnostics& diags, FileAst& out)
      : toks_(std::move(tokens)), diags_(diags), out_(out) {}

  void file() {
    for (const auto& t : toks_)
      if (t.kind == TokenKind::Invalid)
        error(t.location, "invalid-token", "invalid token '" + t.text + "'");
    while (!at_end()) {
      try {
        if (at_kw("signature")) signature();
        else if (at_kw("structure")) structure();
        else if (at_kw("module")) module();
        else if (at_kw("system")) system();
        else {
          syntax("expected a declaration (signature, structure, module, system)");
          throw Abort{};
        }
      } catch (const Abort&) {
        sync_top();
      }
    }
  }

 private:
  // -- token helpers --------------------------------------------------------
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool at(std::string_view p) const { return peek().kind == TokenKind::Punct && peek().text == p; }
  bool at_kw(std::string_view k) const { return peek().kind == TokenKind::Identifier && peek().text == k; }
  const Token& next() {
    const Token& t = peek();
    if (!at_end()) ++pos_;
    return t;
  }

  void error(const SourceLocation& loc, std::string code, std::string msg) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(code), "", std::move(msg), loc});
  }

  void syntax(const std::string& msg) {
    const Token& t = peek();
    if (t.kind == TokenKind::Invalid) throw Abort{};  // already reported by the lexer pass
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    error(t.location, "syntax", msg + ", found " + found);
  }

  void expect(std::string_view p) {
    if (at(p)) {
      next();
      return;
    }
    syntax("expected '" + std::string(p) + "'");
    throw Abort{};
  }

  void expect_kw(std::string_view k) {
    if (at_kw(k)) {
      next();
      return;
    }
    syntax("expected '" + std::string(k) + "'");
    throw Abort{};
  }

  Name name(const char* what = "a name") {
    const Token& t = peek();
    if ((t.kind == TokenKind::Identifier && !is_keyword(t.text)) || t.kind == TokenKind::Number ||
        t.kind == TokenKind::String) {
      next();
      return Name{t.text, t.location};
    }
    syntax(std::string("expected ") + what);
    throw Abort{};
  }

  void sync_top() {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0 && is_top_keyword(peek())) return;
      if (at("{")) ++depth;
      if (at("}") && depth > 0) --depth;
      next();
    }
  }

  void sync_statement() {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0 && is_top_keyword(peek())) return;
      if (at("{")) ++depth;
      if (at("}")) {
        if (depth == 0) return;
        --depth;
      }
      if (at(";") && depth == 0) {
        next();
        return;
      }
      next();
    }
  }

  /// Parses `{ stmt* }`, recovering per statement.
  template <typename F>
  void block(F statement) {
    expect("{");
    while (!at("}")) {
      if (at_end() || is_top_keyword(peek())) {
        syntax("expected '}'");
        throw Abort{};
      }
      std::size_t before = pos_;
      try {
        statement();
      } catch (const Abort&) {
        sync_statement();
        if (pos_ == before && !at("}")) next();
      }
    }
    next();
  }

  // -- declarations ---------------------------------------------------------
  void signature() {
    next();
    SignatureAst sig;
    sig.name = name("a signature name");
    block([&] {
      if (at_kw("sorts")) {
        next();
        sig.sorts.push_back(name("a sort name"));
        while (at(",")) {
          next();
          sig.sorts.push_back(name("a sort name"));
        }
        expect(";");
      } else if (at_kw("set") || at_kw("const")) {
        bool is_set = at_kw("set");
        next();
        SignatureAst::Symbol s;
        s.name = name("a symbol name");
        expect(":");
        s.sort = name("a sort name");
        expect(";");
        (is_set ? sig.sets : sig.constants).push_back(std::move(s));
      } else if (at_kw("fn")) {
        next();
        SignatureAst::Function f;
        f.name = name("a function name");
        expect(":");
        if (!at("->")) {
          f.args.push_back(name("a sort name"));
          while (at(",")) {
            next();
            f.args.push_back(name("a sort name"));
          }
        }
        expect("->");
        f.result = name("a sort name");
        while (at_kw("injective") || at_kw("partial") || at_kw("total")) {
          const Token& t = next();
          f.flags.push_back(Name{t.text, t.location});
        }
        expect(";");
        sig.functions.push_back(std::move(f));
      } else {
        syntax("expected 'sorts', 'set', 'const' or 'fn'");
        throw Abort{};
      }
    });
    out_.signatures.push_back(std::move(sig));
  }

  void structure() {
    next();
    StructureAst st;
    st.name = name("a structure name");
    expect(":");
    st.signature = name("a signature name");
    block([&] {
      StructureAst::Entry e;
      e.lhs = name("a sort or symbol name");
      expect("=");
      if (at("{")) {
        next();
        e.braced = true;
        if (!at("}")) {
          e.items.push_back(item());
          while (at(",")) {
            next();
            e.items.push_back(item());
          }
        }
        expect("}");
      } else {
        e.single = name("an atom");
      }
      expect(";");
      st.entries.push_back(std::move(e));
    });
    out_.structures.push_back(std::move(st));
  }

  StructureAst::Item item() {
    StructureAst::Item it;
    if (at("(")) {
      const Token& open = next();
      if (at(")")) {
        next();
        expect("->");
        it.result = name("an atom");
        it.loc = open.location;
        return it;
      }
      it.args.push_back(name("an atom"));
      while (at(",")) {
        next();
        it.args.push_back(name("an atom"));
      }
      expect(")");
      expect("->");
      it.result = name("an atom");
      it.loc = it.args.front().loc;
      return it;
    }
    it.args.push_back(name("an atom"));
    it.loc = it.args.front().loc;
    if (at("->")) {
      next();
      it.result = name("an atom");
    }
    return it;
  }

  void module() {
    next();
    ModuleAst m;
    m.name = name("a module name");
    if (at(":")) {
      next();
      m.signature = name("a signature name");
    }
    bool seen_left = false, seen_right = false;
    block([&] {
      if (at_kw("left") || at_kw("right")) {
        bool left = at_kw("left");
        const Token& kw = next();
        bool& seen = left ? seen_left : seen_right;
        if (seen) error(kw.location, "duplicate-section", "second '" + kw.text + "' section");
        seen = true;
        auto& side = left ? m.left : m.right;
        block([&] { side.push_back(element()); });
      } else if (at_kw("net")) {
        const Token& kw = next();
        if (m.has_net) error(kw.location, "duplicate-section", "second 'net' section");
        m.has_net = true;
        m.net_loc = kw.location;
        block([&] { net_statement(m); });
      } else {
        syntax("expected 'left', 'right' or 'net'");
        throw Abort{};
      }
    });
    out_.modules.push_back(std::move(m));
  }

  ModuleAst::Element element() {
    ModuleAst::Element e;
    if (at_kw("place")) e.kind = ElementKind::Place;
    else if (at_kw("transition")) e.kind = ElementKind::Transition;
    else {
      syntax("expected 'place' or 'transition'");
      throw Abort{};
    }
    next();
    e.label = name("an interface label");
    if (e.kind == ElementKind::Place && at(":")) {
      next();
      e.sort = name("a sort name");
    }
    if (at("=")) {
      next();
      e.node = name("a node name");
    }
    expect(";");
    return e;
  }

  void net_statement(ModuleAst& m) {
    if (at_kw("var")) {
      next();
      ModuleAst::Var v;
      v.name = name("a variable name");
      expect(":");
      v.sort = name("a sort name");
      expect(";");
      m.vars.push_back(std::move(v));
    } else if (at_kw("place")) {
      next();
      ModuleAst::PlaceDecl p;
      p.name = name("a place name");
      expect(":");
      p.sort = name("a sort name");
      if (at_kw("init")) {
        next();
        p.init = term();
      }
      expect(";");
      m.places.push_back(std::move(p));
    } else if (at_kw("transition")) {
      next();
      ModuleAst::TransitionDecl t;
      t.name = name("a transition name");
      if (at_kw("guard")) {
        next();
        t.guard = condition();
      }
      expect(";");
      m.transitions.push_back(std::move(t));
    } else if (at_kw("arc")) {
      next();
      ModuleAst::ArcDecl a{name("a node name"), {}, {}};
      expect("->");
      a.to = name("a node name");
      expect(":");
      a.inscription = term();
      expect(";");
      m.arcs.push_back(std::move(a));
    } else {
      syntax("expected 'var', 'place', 'transition' or 'arc'");
      throw Abort{};
    }
  }

  TermAst condition() {
    TermAst first = comparison();
    if (!at("&&")) return first;
    TermAst conj{TermAst::Kind::And, "&&", first.loc, {std::move(first)}};
    while (at("&&")) {
      next();
      conj.args.push_back(comparison());
    }
    return conj;
  }

  TermAst comparison() {
    TermAst lhs = term();
    if (!at("==") && !at("!=")) {
      syntax("expected '==' or '!=' in a guard");
      throw Abort{};
    }
    const Token& op = next();
    TermAst rhs = term();
    return TermAst{op.text == "==" ? TermAst::Kind::Eq : TermAst::Kind::Neq, op.text, lhs.loc,
                   {std::move(lhs), std::move(rhs)}};
  }

  TermAst term() {
    if (at_kw("elm")) {
      const Token& kw = next();
      expect("(");
      Name set = name("a set symbol");
      expect(")");
      return TermAst{TermAst::Kind::Elm, set.text, kw.location, {}};
    }
    Name n = name("a term");
    if (!at("(")) return TermAst{TermAst::Kind::Ref, n.text, n.loc, {}};
    next();
    TermAst call{TermAst::Kind::Call, n.text, n.loc, {}};
    if (!at(")")) {
      call.args.push_back(term());
      while (at(",")) {
        next();
        call.args.push_back(term());
      }
    }
    expect(")");
    return call;
  }

  void system() {
    next();
    SystemAst s;
    s.name = name("a system name");
    expect("=");
    s.expr = composition();
    expect(";");
    out_.systems.push_back(std::move(s));
  }

  SystemExprAst composition() {
    SystemExprAst lhs = operand();
    while (at(".")) {
      next();
      SystemExprAst rhs = operand();
      SystemExprAst node{lhs.module, {}};
      node.operands.push_back(std::move(lhs));
      node.operands.push_back(std::move(rhs));
      lhs = std::move(node);
    }
    return lhs;
  }

  SystemExprAst operand() {
    if (at("(")) {
      next();
      SystemExprAst inner = composition();
      expect(")");
      return inner;
    }
    return SystemExprAst{name("a module name"), {}};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Diagnostics& diags_;
  FileAst& out_;
};

// ---------------------------------------------------------------------------
// Resolution

class Resolver {
 public:
  explicit Resolver(Diagnostics& diags) : diags_(diags) {}

  ModelSet resolve(const std::vector<FileAst>& files) {
    for (const auto& f : files)
      for (const auto& s : f.signatures) signature(s);
    for (const auto& f : files)
      for (const auto& s : f.structures) structure(s);
    for (const auto& f : files)
      for (const auto& m : f.modules) module(m);
    for (const auto& f : files)
      for (const auto& s : f.systems) system(s);
    return std::move(model_);
  }

 private:
  void error(const SourceLocation& loc, std::string code, std::string subject, std::string msg) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(code), std::move(subject), std::move(msg), loc});
  }

  /// Attaches a source location to diagnostics produced by the model layer.
  void relay(Diagnostics ds, const std::map<std::string, SourceLocation>& where, const SourceLocation& fallback) {
    for (auto& d : ds) {
      auto it = where.find(d.subject);
      d.location = it != where.end() ? it->second : fallback;
      diags_.push_back(std::move(d));
    }
  }

  bool claim(std::set<std::string>& names, const Name& n, const char* kind) {
    if (names.insert(n.text).second) return true;
    error(n.loc, "duplicate-declaration", n.text, std::string("duplicate ") + kind + " '" + n.text + "'");
    return false;
  }

  void signature(const SignatureAst& a) {
    if (!claim(signature_names_, a.name, "signature")) return;
    auto sig = std::make_shared<Signature>();
    sig->name = a.name.text;
    std::map<std::string, SourceLocation> where;
    std::set<std::string> sorts;
    for (const auto& s : a.sorts) {
      sig->sorts.push_back(s.text);
      sorts.insert(s.text);
      where.emplace(s.text, s.loc);
    }
    auto sort_ref = [&](const Name& s) {
      if (!sorts.count(s.text)) error(s.loc, "unresolved-name", s.text, "undeclared sort '" + s.text + "'");
    };
    for (const auto& s : a.sets) {
      sort_ref(s.sort);
      sig->sets.push_back({s.name.text, s.sort.text});
      where.emplace(s.name.text, s.name.loc);
    }
    for (const auto& c : a.constants) {
      sort_ref(c.sort);
      sig->constants.push_back({c.name.text, c.sort.text});
      where.emplace(c.name.text, c.name.loc);
    }
    for (const auto& f : a.functions) {
      FunctionSymbol fs{f.name.text, {}, f.result.text};
      for (const auto& s : f.args) {
        sort_ref(s);
        fs.argSorts.push_back(s.text);
      }
      sort_ref(f.result);
      sig->functions.push_back(std::move(fs));
      where.emplace(f.name.text, f.name.loc);
      for (const auto& flag : f.flags) {
        RequirementKind k = flag.text == "injective" ? RequirementKind::Injective
                            : flag.text == "partial" ? RequirementKind::Partial
                                                     : RequirementKind::Total;
        sig->requirements.push_back({k, f.name.text});
      }
    }
    // Undeclared sorts were reported above at the exact reference.
    auto ds = validate_signature(*sig);
    ds.erase(std::remove_if(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.code == "undeclared-sort"; }),
             ds.end());
    // Duplicate names are reported at the later occurrence.
    for (auto& d : ds)
      if (d.code == "duplicate-name") d.subject = "\x01" + d.subject;
    std::map<std::string, std::vector<SourceLocation>> all_locs;
    for (const auto& s : a.sorts) all_locs[s.text].push_back(s.loc);
    for (const auto& s : a.sets) all_locs[s.name.text].push_back(s.name.loc);
    for (const auto& s : a.constants) all_locs[s.name.text].push_back(s.name.loc);
    for (const auto& f : a.functions) all_locs[f.name.text].push_back(f.name.loc);
    std::map<std::string, std::size_t> dup_seen;
    for (auto& d : ds) {
      if (d.subject.rfind("\x01", 0) == 0) {
        d.subject.erase(0, 1);
        auto& locs = all_locs[d.subject];
        std::size_t k = ++dup_seen[d.subject];
        d.location = k < locs.size() ? locs[k] : a.name.loc;
        diags_.push_back(std::move(d));
      } else {
        auto it = where.find(d.subject);
        d.location = it != where.end() ? it->second : a.name.loc;
        diags_.push_back(std::move(d));
      }
    }
    model_.signatures.push_back(sig);
  }

  void structure(const StructureAst& a) {
    if (!claim(structure_names_, a.name, "structure")) return;
    SignaturePtr sig = model_.find_signature(a.signature.text);
    if (!sig) {
      error(a.signature.loc, "unresolved-name", a.signature.text, "undeclared signature '" + a.signature.text + "'");
      return;
    }
    auto st = std::make_shared<Structure>();
    st->name = a.name.text;
    st->signature = sig;
    std::map<std::string, SourceLocation> where;
    std::set<std::string> assigned;
    for (const auto& e : a.entries) {
      const std::string& lhs = e.lhs.text;
      if (!assigned.insert(lhs).second) {
        error(e.lhs.loc, "duplicate-declaration", lhs, "'" + lhs + "' is interpreted twice");
        continue;
      }
      where.emplace(lhs, e.lhs.loc);
      bool is_sort = sig->has_sort(lhs);
      bool is_set = sig->find_set(lhs) != nullptr;
      bool is_const = sig->find_constant(lhs) != nullptr;
      bool is_fn = sig->find_function(lhs) != nullptr;
      if (!is_sort && !is_set && !is_const && !is_fn) {
        error(e.lhs.loc, "unresolved-name", lhs, "'" + lhs + "' is not a sort or symbol of " + sig->name);
        continue;
      }
      if (is_const) {
        if (e.braced) {
          error(e.lhs.loc, "shape", lhs, "constant '" + lhs + "' needs a single atom");
          continue;
        }
        st->constants[lhs] = e.single.text;
        continue;
      }
      if (!e.braced) {
        error(e.lhs.loc, "shape", lhs, "'" + lhs + "' needs a braced value");
        continue;
      }
      if (is_fn) {
        FunctionTable table;
        for (const auto& it : e.items) {
          if (!it.result) {
            error(it.loc, "shape", lhs, "function entries have the form 'arg -> result'");
            continue;
          }
          std::vector<Atom> args;
          for (const auto& x : it.args) args.push_back(x.text);
          if (!table.emplace(args, it.result->text).second)
            error(it.loc, "duplicate-entry", lhs, "'" + lhs + "' is defined twice at one argument");
        }
        st->functions[lhs] = std::move(table);
        continue;
      }
      std::set<Atom> atoms;
      for (const auto& it : e.items) {
        if (it.result || it.args.size() != 1) {
          error(it.loc, "shape", lhs, "sets list atoms separated by commas");
          continue;
        }
        if (!atoms.insert(it.args.front().text).second)
          error(it.loc, "duplicate-atom", lhs, "atom '" + it.args.front().text + "' listed twice");
      }
      (is_sort ? st->carriers : st->sets)[lhs] = std::move(atoms);
    }
    relay(validate_structure(*st), where, a.name.loc);
    model_.structures.push_back(st);
  }

  std::optional<Term> term(const TermAst& t, const Signature& sig, const std::map<std::string, std::string>& vars,
                           bool allow_elm) {
    try {
      return build(t, sig, vars, allow_elm);
    } catch (const Error& e) {
      error(t.loc, e.code() == ErrorCode::UnknownSymbol ? "unresolved-name" : "sort", t.name, e.what());
    } catch (const Abort&) {
    }
    return std::nullopt;
  }

  Term build(const TermAst& t, const Signature& sig, const std::map<std::string, std::string>& vars,
             bool allow_elm) {
    switch (t.kind) {
      case TermAst::Kind::Ref: {
        if (auto it = vars.find(t.name); it != vars.end()) return Term::variable(t.name, it->second);
        if (sig.find_constant(t.name)) return Term::constant(sig, t.name);
        throw Error(ErrorCode::UnknownSymbol, "'" + t.name + "' is neither a declared variable nor a constant");
      }
      case TermAst::Kind::Call: {
        std::vector<Term> args;
        for (const auto& a : t.args) args.push_back(build(a, sig, vars, false));
        return Term::apply(sig, t.name, std::move(args));
      }
      case TermAst::Kind::Elm:
        if (!allow_elm) {
          error(t.loc, "elm-misplaced", t.name, "elm(...) may only appear as an initial inscription");
          throw Abort{};
        }
        return Term::elm(sig, t.name);
      case TermAst::Kind::Eq:
        return Term::equal(build(t.args[0], sig, vars, false), build(t.args[1], sig, vars, false));
      case TermAst::Kind::Neq:
        return Term::not_equal(build(t.args[0], sig, vars, false), build(t.args[1], sig, vars, false));
      case TermAst::Kind::And: {
        std::vector<Term> parts;
        for (const auto& a : t.args) parts.push_back(build(a, sig, vars, false));
        return Term::conjunction(std::move(parts));
      }
    }
    throw Error(ErrorCode::UnknownSymbol, "bad term");
  }

  void module(const ModuleAst& a) {
    if (!claim(module_names_, a.name, "module")) return;
    const std::size_t errors_before = diags_.size();
    Module m;
    m.name = a.name.text;
    SignaturePtr sig;
    if (a.signature) {
      sig = model_.find_signature(a.signature->text);
      if (!sig)
        error(a.signature->loc, "unresolved-name", a.signature->text,
              "undeclared signature '" + a.signature->text + "'");
    } else if (a.has_net) {
      error(a.net_loc, "missing-signature", a.name.text, "module '" + a.name.text + "' has a net but no signature");
    }

    std::map<std::string, std::pair<ElementKind, std::size_t>> nodes;
    std::map<std::string, SourceLocation> where;
    if (a.has_net && sig) {
      NetSchema schema;
      schema.signature = sig;
      std::map<std::string, std::string> vars;
      for (const auto& v : a.vars) {
        if (!sig->has_sort(v.sort.text)) {
          error(v.sort.loc, "unresolved-name", v.sort.text, "undeclared sort '" + v.sort.text + "'");
          continue;
        }
        if (!vars.emplace(v.name.text, v.sort.text).second)
          error(v.name.loc, "duplicate-declaration", v.name.text, "variable '" + v.name.text + "' declared twice");
        if (sig->find_constant(v.name.text))
          error(v.name.loc, "duplicate-declaration", v.name.text,
                "variable '" + v.name.text + "' shadows a constant");
      }
      auto claim_node = [&](const Name& n, ElementKind k, std::size_t idx) {
        if (!nodes.emplace(n.text, std::make_pair(k, idx)).second) {
          error(n.loc, "duplicate-declaration", n.text, "node '" + n.text + "' declared twice");
          return false;
        }
        where.emplace(n.text, n.loc);
        return true;
      };
      for (const auto& p : a.places) {
        if (!sig->has_sort(p.sort.text)) {
          error(p.sort.loc, "unresolved-name", p.sort.text, "undeclared sort '" + p.sort.text + "'");
          continue;
        }
        Place place{p.name.text, p.sort.text, std::nullopt};
        if (p.init) {
          place.init = term(*p.init, *sig, {}, true);
          if (!place.init) continue;
        }
        if (!claim_node(p.name, ElementKind::Place, schema.places.size())) continue;
        schema.places.push_back(std::move(place));
      }
      for (const auto& t : a.transitions) {
        Transition tr{t.name.text, std::nullopt};
        if (t.guard) {
          tr.guard = term(*t.guard, *sig, vars, false);
          if (!tr.guard) continue;
        }
        if (!claim_node(t.name, ElementKind::Transition, schema.transitions.size())) continue;
        schema.transitions.push_back(std::move(tr));
      }
      for (const auto& arc : a.arcs) {
        auto from = nodes.find(arc.from.text);
        auto to = nodes.find(arc.to.text);
        if (from == nodes.end()) {
          error(arc.from.loc, "unresolved-name", arc.from.text, "undeclared node '" + arc.from.text + "'");
          continue;
        }
        if (to == nodes.end()) {
          error(arc.to.loc, "unresolved-name", arc.to.text, "undeclared node '" + arc.to.text + "'");
          continue;
        }
        if (from->second.first == to->second.first) {
          error(arc.from.loc, "arc-kind", arc.from.text, "arcs must join a place and a transition");
          continue;
        }
        auto inscription = term(arc.inscription, *sig, vars, false);
        if (!inscription) continue;
        bool outgoing = from->second.first == ElementKind::Place;
        schema.arcs.push_back(Arc{outgoing ? from->second.second : to->second.second,
                                  outgoing ? to->second.second : from->second.second,
                                  outgoing ? ArcDirection::PlaceToTransition : ArcDirection::TransitionToPlace,
                                  *inscription});
      }
      auto ds = validate_schema(schema);
      for (auto& d : ds) {
        // arc diagnostics name "a -> b"; locate them by their source node
        std::string key = d.subject.substr(0, d.subject.find(" -> "));
        auto it = where.find(key);
        d.location = it != where.end() ? it->second : a.net_loc;
        diags_.push_back(std::move(d));
      }
      m.interior = std::move(schema);
    } else {
      m.interior = Abstract{};
    }

    auto side = [&](const std::vector<ModuleAst::Element>& elems) {
      std::vector<InterfaceElement> out;
      std::set<std::string> labels;
      for (const auto& e : elems) {
        InterfaceElement ie{e.label.text, e.kind, std::nullopt, std::nullopt};
        if (!labels.insert(e.label.text).second) {
          error(e.label.loc, "duplicate-label", e.label.text, "label '" + e.label.text + "' occurs twice");
          continue;
        }
        if (e.sort) {
          if (sig && !sig->has_sort(e.sort->text)) {
            error(e.sort->loc, "unresolved-name", e.sort->text, "undeclared sort '" + e.sort->text + "'");
            continue;
          }
          ie.sort = e.sort->text;
        }
        if (e.node) {
          if (!a.has_net) {
            error(e.node->loc, "abstract-binding", e.node->text, "abstract modules cannot bind interface elements");
            continue;
          }
          auto it = nodes.find(e.node->text);
          if (it == nodes.end()) {
            error(e.node->loc, "unresolved-name", e.node->text, "undeclared node '" + e.node->text + "'");
            continue;
          }
          if (it->second.first != e.kind) {
            error(e.node->loc, "binding", e.node->text,
                  "interface " + to_string(e.kind) + " '" + e.label.text + "' is bound to a " +
                      to_string(it->second.first));
            continue;
          }
          ie.node = it->second.second;
        } else if (nodes.count(e.label.text)) {
          error(e.label.loc, "implicit-binding", e.label.text,
                "interface element '" + e.label.text + "' shares its name with an interior node; bind it with '= " +
                    e.label.text + "'");
          continue;
        }
        out.push_back(std::move(ie));
      }
      return out;
    };
    m.left = side(a.left);
    m.right = side(a.right);
    if (diags_.size() == errors_before) relay(validate_module(m), {}, a.name.loc);
    model_.modules.push_back(std::move(m));
  }

  std::optional<SystemExpr> expr(const SystemExprAst& e) {
    if (e.operands.empty()) {
      if (!module_names_.count(e.module.text)) {
        error(e.module.loc, "unresolved-name", e.module.text, "undeclared module '" + e.module.text + "'");
        return std::nullopt;
      }
      return SystemExpr{e.module.text, {}};
    }
    auto lhs = expr(e.operands[0]);
    auto rhs = expr(e.operands[1]);
    if (!lhs || !rhs) return std::nullopt;
    return SystemExpr{"", {std::move(*lhs), std::move(*rhs)}};
  }

  void system(const SystemAst& a) {
    if (!claim(system_names_, a.name, "system")) return;
    auto e = expr(a.expr);
    if (e) model_.systems.push_back(SystemDecl{a.name.text, std::move(*e)});
  }

  Diagnostics& diags_;
  ModelSet model_;
  std::set<std::string> signature_names_, structure_names_, module_names_, system_names_;
};

}  // namespace

ParseResult parse(const std::vector<SourceFile>& files) {
  ParseResult result;
  std::vector<FileAst> asts;
  for (const auto& f : files) {
    FileAst ast;
    Parser(tokenize(f.text, f.path), result.diagnostics, ast).file();
    asts.push_back(std::move(ast));
  }
  ModelSet model = Resolver(result.diagnostics).resolve(asts);
  if (!has_errors(result.diagnostics)) result.model = std::move(model);
  return result;
}

ParseResult parse(const std::string& text, const std::string& path) { return parse({SourceFile{path, text}}); }

}  // namespace hkl::dsl
