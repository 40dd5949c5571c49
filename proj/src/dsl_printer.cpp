#include <set>
#include <sstream>

#include "hkl/dsl.hpp"
#include "hkl/error.hpp"
#include "hkl/names.hpp"

namespace hkl::dsl {

namespace {

std::string q(const std::string& s) { return quote_name(s); }

void print_signature(std::ostream& os, const Signature& sig) {
  os << "signature " << q(sig.name) << " {\n";
  if (!sig.sorts.empty()) {
    os << "  sorts ";
    for (std::size_t i = 0; i < sig.sorts.size(); ++i) os << (i ? ", " : "") << q(sig.sorts[i]);
    os << ";\n";
  }
  for (const auto& s : sig.sets) os << "  set " << q(s.name) << " : " << q(s.sort) << ";\n";
  for (const auto& c : sig.constants) os << "  const " << q(c.name) << " : " << q(c.sort) << ";\n";
  for (const auto& f : sig.functions) {
    os << "  fn " << q(f.name) << " : ";
    for (std::size_t i = 0; i < f.argSorts.size(); ++i) os << (i ? ", " : "") << q(f.argSorts[i]);
    os << (f.argSorts.empty() ? "-> " : " -> ") << q(f.resultSort);
    for (const auto& r : sig.requirements)
      if (r.subject == f.name) os << ' ' << to_string(r.kind);
    os << ";\n";
  }
  os << "}\n";
}

void print_atoms(std::ostream& os, const std::set<Atom>& atoms) {
  os << '{';
  bool first = true;
  for (const auto& a : atoms) {
    os << (first ? " " : ", ") << q(a);
    first = false;
  }
  os << (atoms.empty() ? "}" : " }");
}

void print_structure(std::ostream& os, const Structure& st) {
  os << "structure " << q(st.name) << " : " << q(st.signature->name) << " {\n";
  for (const auto& [sort, atoms] : st.carriers) {
    os << "  " << q(sort) << " = ";
    print_atoms(os, atoms);
    os << ";\n";
  }
  for (const auto& [set, atoms] : st.sets) {
    os << "  " << q(set) << " = ";
    print_atoms(os, atoms);
    os << ";\n";
  }
  for (const auto& [c, v] : st.constants) os << "  " << q(c) << " = " << q(v) << ";\n";
  for (const auto& [fn, table] : st.functions) {
    os << "  " << q(fn) << " = {";
    bool first = true;
    for (const auto& [args, result] : table) {
      os << (first ? " " : ", ");
      first = false;
      if (args.size() == 1) {
        os << q(args[0]);
      } else {
        os << '(';
        for (std::size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << q(args[i]);
        os << ')';
      }
      os << " -> " << q(result);
    }
    os << (table.empty() ? "};\n" : " };\n");
  }
  os << "}\n";
}

void print_side(std::ostream& os, const char* keyword, const std::vector<InterfaceElement>& side,
                const NetSchema* schema) {
  os << "  " << keyword << " {";
  if (side.empty()) {
    os << "}\n";
    return;
  }
  os << '\n';
  for (const auto& e : side) {
    os << "    " << to_string(e.kind) << ' ' << q(e.label);
    if (e.sort) os << " : " << q(*e.sort);
    if (e.node && schema) {
      const std::string& node =
          e.kind == ElementKind::Place ? schema->places[*e.node].name : schema->transitions[*e.node].name;
      os << " = " << q(node);
    } else if (schema && !e.node &&
               (schema->find_place(e.label) || schema->find_transition(e.label))) {
      throw Error(ErrorCode::Format, "unbound interface element '" + e.label + "' shares a node name");
    }
    os << ";\n";
  }
  os << "  }\n";
}

void print_module(std::ostream& os, const Module& m) {
  const NetSchema* schema = std::get_if<NetSchema>(&m.interior);
  if (!schema && !std::holds_alternative<Abstract>(m.interior))
    throw Error(ErrorCode::Format,
                "module '" + m.name + "' has a " + to_string(interior_kind(m.interior)) + " interior");
  os << "module " << q(m.name);
  if (schema) os << " : " << q(schema->signature->name);
  os << " {\n";
  print_side(os, "left", m.left, schema);
  print_side(os, "right", m.right, schema);
  if (schema) {
    std::map<std::string, std::string> vars;
    auto collect = [&](const Term& t) {
      for (const auto& [v, sort] : t.variables()) {
        auto [it, fresh] = vars.emplace(v, sort);
        if (!fresh && it->second != sort)
          throw Error(ErrorCode::Format, "variable '" + v + "' is used with two sorts in module '" + m.name + "'");
      }
    };
    for (const auto& a : schema->arcs) collect(a.inscription);
    for (const auto& t : schema->transitions)
      if (t.guard) collect(*t.guard);
    os << "  net {\n";
    for (const auto& [v, sort] : vars) os << "    var " << q(v) << " : " << q(sort) << ";\n";
    for (const auto& p : schema->places) {
      os << "    place " << q(p.name) << " : " << q(p.sort);
      if (p.init) os << " init " << p.init->to_string();
      os << ";\n";
    }
    for (const auto& t : schema->transitions) {
      os << "    transition " << q(t.name);
      if (t.guard) os << " guard " << t.guard->to_string();
      os << ";\n";
    }
    for (const auto& a : schema->arcs) {
      const std::string& p = schema->places[a.place].name;
      const std::string& t = schema->transitions[a.transition].name;
      bool in = a.direction == ArcDirection::PlaceToTransition;
      os << "    arc " << q(in ? p : t) << " -> " << q(in ? t : p) << " : " << a.inscription.to_string() << ";\n";
    }
    os << "  }\n";
  }
  os << "}\n";
}

std::string print_expr(const SystemExpr& e, bool nested) {
  if (e.is_leaf()) return q(e.module);
  std::string s = print_expr(e.operands[0], false) + " . " + print_expr(e.operands[1], true);
  return nested ? "(" + s + ")" : s;
}

}  // namespace

std::string pretty_print(const ModelSet& model) {
  std::ostringstream os;
  bool first = true;
  auto gap = [&] {
    if (!first) os << '\n';
    first = false;
  };
  for (const auto& s : model.signatures) {
    gap();
    print_signature(os, *s);
  }
  for (const auto& s : model.structures) {
    gap();
    print_structure(os, *s);
  }
  for (const auto& m : model.modules) {
    gap();
    print_module(os, m);
  }
  if (!model.systems.empty()) gap();
  for (const auto& s : model.systems) os << "system " << q(s.name) << " = " << print_expr(s.expr, false) << ";\n";
  return os.str();
}

}  // namespace hkl::dsl
