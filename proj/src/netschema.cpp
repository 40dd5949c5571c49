#include "hkl/netschema.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "hkl/error.hpp"
#include "hkl/names.hpp"

namespace hkl {

std::optional<std::size_t> NetSchema::find_place(const std::string& name) const {
  for (std::size_t i = 0; i < places.size(); ++i)
    if (places[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> NetSchema::find_transition(const std::string& name) const {
  for (std::size_t i = 0; i < transitions.size(); ++i)
    if (transitions[i].name == name) return i;
  return std::nullopt;
}

bool NetSchema::operator==(const NetSchema& other) const {
  bool same_sig = signature == other.signature ||
                  (signature && other.signature && *signature == *other.signature);
  return same_sig && places == other.places && transitions == other.transitions &&
         arcs == other.arcs;
}

bool NetInstance::operator==(const NetInstance& other) const {
  bool same_structure = structure == other.structure ||
                        (structure && other.structure && *structure == *other.structure);
  return same_structure && schema == other.schema && marking == other.marking;
}

std::size_t Marking::total() const {
  std::size_t n = 0;
  for (const auto& [_, ms] : tokens)
    for (const auto& [_, k] : ms) n += k;
  return n;
}

std::string format_marking(const Marking& m) {
  std::ostringstream os;
  bool first_place = true;
  for (const auto& [place, ms] : m.tokens) {
    if (!first_place) os << ", ";
    first_place = false;
    os << place << ": {";
    bool first = true;
    for (const auto& [atom, k] : ms)
      for (std::size_t i = 0; i < k; ++i) {
        if (!first) os << ", ";
        first = false;
        os << atom;
      }
    os << '}';
  }
  return os.str();
}

std::string format_mode(const Mode& m) {
  return "(" + m.transition + ", " + format_valuation(m.valuation) + ")";
}

namespace {

Diagnostic diag(std::string code, std::string subject, std::string message) {
  return Diagnostic{Severity::Error, std::move(code), std::move(subject), std::move(message), {}};
}

void collect_vars(const Term& t, std::vector<std::pair<std::string, std::string>>& out) {
  if (t.kind() == TermKind::Variable) out.emplace_back(t.name(), t.sort());
  for (const auto& a : t.args()) collect_vars(a, out);
}

}  // namespace

Diagnostics validate_schema(const NetSchema& schema, bool executable) {
  Diagnostics out;
  if (!schema.signature) {
    out.push_back(diag("missing-signature", "", "net schema has no signature"));
    return out;
  }
  const Signature& sig = *schema.signature;

  std::set<std::string> names;
  for (const auto& p : schema.places) {
    if (!names.insert(p.name).second)
      out.push_back(diag("duplicate-name", p.name, "duplicate node name '" + p.name + "'"));
    if (!sig.has_sort(p.sort))
      out.push_back(diag("undeclared-sort", p.name,
                         "place '" + p.name + "' has undeclared sort '" + p.sort + "'"));
    if (p.init) {
      const Term& init = *p.init;
      if (init.sort() != p.sort)
        out.push_back(diag("init-sort", p.name,
                           "initial inscription of '" + p.name + "' has sort " + init.sort()));
      if (init.kind() != TermKind::Elm && init.contains_elm())
        out.push_back(diag("elm-misplaced", p.name, "elm(...) must be the whole initial inscription"));
      if (!init.variables().empty())
        out.push_back(diag("init-open", p.name,
                           "initial inscription of '" + p.name + "' contains variables"));
    }
  }
  for (const auto& t : schema.transitions)
    if (!names.insert(t.name).second)
      out.push_back(diag("duplicate-name", t.name, "duplicate node name '" + t.name + "'"));

  struct TransitionVars {
    std::vector<std::pair<std::string, std::string>> all;
    std::set<std::string> input;
    std::set<std::string> output;
  };
  std::vector<TransitionVars> vars(schema.transitions.size());

  for (const auto& a : schema.arcs) {
    if (a.place >= schema.places.size() || a.transition >= schema.transitions.size()) {
      out.push_back(diag("dangling-arc", "", "arc refers to a missing node"));
      continue;
    }
    const Place& p = schema.places[a.place];
    const Transition& t = schema.transitions[a.transition];
    std::string arc_name = a.direction == ArcDirection::PlaceToTransition
                               ? p.name + " -> " + t.name
                               : t.name + " -> " + p.name;
    if (a.inscription.contains_elm())
      out.push_back(diag("elm-misplaced", arc_name, "elm(...) may only appear as an initial inscription"));
    if (a.inscription.sort() != p.sort)
      out.push_back(diag("arc-sort", arc_name,
                         "inscription of arc " + arc_name + " has sort " + a.inscription.sort() +
                             ", place has sort " + p.sort));
    std::vector<std::pair<std::string, std::string>> vs;
    collect_vars(a.inscription, vs);
    auto& tv = vars[a.transition];
    for (const auto& v : vs) {
      tv.all.push_back(v);
      (a.direction == ArcDirection::PlaceToTransition ? tv.input : tv.output).insert(v.first);
    }
  }

  for (std::size_t i = 0; i < schema.transitions.size(); ++i) {
    const Transition& t = schema.transitions[i];
    auto& tv = vars[i];
    if (t.guard) {
      if (!t.guard->is_boolean())
        out.push_back(diag("guard-sort", t.name, "guard of '" + t.name + "' is not a condition"));
      if (t.guard->contains_elm())
        out.push_back(diag("elm-misplaced", t.name, "elm(...) may only appear as an initial inscription"));
      std::vector<std::pair<std::string, std::string>> gs;
      collect_vars(*t.guard, gs);
      for (const auto& v : gs) {
        tv.all.push_back(v);
        if (!tv.input.count(v.first))
          out.push_back(diag("guard-unbound", t.name,
                             "guard variable '" + v.first + "' of '" + t.name +
                                 "' occurs on no input arc"));
      }
    }
    std::map<std::string, std::string> sorts;
    for (const auto& [n, s] : tv.all) {
      auto [it, fresh] = sorts.emplace(n, s);
      if (!fresh && it->second != s) {
        out.push_back(diag("variable-sort", t.name,
                           "variable '" + n + "' of '" + t.name + "' used with sorts " + it->second +
                               " and " + s));
        it->second = s;
      }
    }
    if (executable)
      for (const auto& v : tv.output)
        if (!tv.input.count(v))
          out.push_back(diag("free-output-variable", t.name,
                             "variable '" + v + "' of '" + t.name + "' occurs only on output arcs"));
  }
  return out;
}

namespace {

void add(Multiset& ms, const Atom& a, std::size_t k = 1) { ms[a] += k; }

bool contains(const Multiset& have, const Multiset& need) {
  for (const auto& [a, k] : need) {
    auto it = have.find(a);
    if (it == have.end() || it->second < k) return false;
  }
  return true;
}

void subtract(Multiset& ms, const Multiset& other) {
  for (const auto& [a, k] : other) {
    auto it = ms.find(a);
    it->second -= k;
    if (it->second == 0) ms.erase(it);
  }
}

/// Per-transition view of the schema used by the token game.
struct TransitionInfo {
  std::vector<const Arc*> inputs;
  std::vector<const Arc*> outputs;
  std::map<std::string, std::string> variables;  // name -> sort
};

class TokenGame {
 public:
  TokenGame(const NetSchema& schema, const Structure& structure)
      : schema_(schema), structure_(structure), info_(schema.transitions.size()) {
    for (const auto& a : schema.arcs) {
      auto& ti = info_[a.transition];
      (a.direction == ArcDirection::PlaceToTransition ? ti.inputs : ti.outputs).push_back(&a);
      ti.variables.merge(a.inscription.variables());
    }
    for (std::size_t i = 0; i < schema.transitions.size(); ++i)
      if (schema.transitions[i].guard) info_[i].variables.merge(schema.transitions[i].guard->variables());
    for (std::size_t i = 0; i < schema.transitions.size(); ++i) order_.push_back(i);
    std::sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return schema.transitions[x].name < schema.transitions[y].name;
    });
  }

  /// Effect of a mode when all inscriptions are defined and the guard holds.
  std::optional<ModeEffect> effect(std::size_t t, const Valuation& v) const {
    const auto& ti = info_[t];
    try {
      if (const auto& g = schema_.transitions[t].guard) {
        auto ok = eval_guard(*g, structure_, v);
        if (!ok || !*ok) return std::nullopt;
      }
      ModeEffect e;
      for (const Arc* a : ti.inputs) {
        auto val = eval_term(a->inscription, structure_, v);
        if (!val) return std::nullopt;
        add(e.consumed[schema_.places[a->place].name], *val);
      }
      for (const Arc* a : ti.outputs) {
        auto val = eval_term(a->inscription, structure_, v);
        if (!val) return std::nullopt;
        add(e.produced[schema_.places[a->place].name], *val);
      }
      return e;
    } catch (const Error& err) {
      if (err.code() == ErrorCode::UnboundVariable || err.code() == ErrorCode::SortMismatch)
        return std::nullopt;
      throw;
    }
  }

  bool fits(const ModeEffect& e, const Marking& m) const {
    for (const auto& [place, need] : e.consumed) {
      auto it = m.tokens.find(place);
      if (it == m.tokens.end() || !contains(it->second, need)) return false;
    }
    return true;
  }

  std::vector<Mode> enabled(const Marking& m) const {
    std::vector<Mode> out;
    for (std::size_t t : order_) {
      const auto& ti = info_[t];
      std::vector<std::string> names;
      std::vector<std::vector<Atom>> candidates;
      for (const auto& [var, sort] : ti.variables) {
        names.push_back(var);
        candidates.push_back(candidates_for(ti, var, sort, m));
      }
      std::vector<Mode> local;
      Valuation v;
      search(t, names, candidates, 0, v, m, local);
      out.insert(out.end(), local.begin(), local.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Mode> all(std::size_t cap) const {
    std::vector<Mode> out;
    for (std::size_t t : order_) {
      const auto& ti = info_[t];
      std::vector<std::string> names;
      std::vector<std::vector<Atom>> candidates;
      std::size_t product = 1;
      for (const auto& [var, sort] : ti.variables) {
        names.push_back(var);
        const auto& c = structure_.carrier(sort);
        candidates.emplace_back(c.begin(), c.end());
        product *= std::max<std::size_t>(c.size(), 1);
        if (product > cap)
          throw Error(ErrorCode::CapExceeded, "transition '" + schema_.transitions[t].name +
                                                  "' has more than " + std::to_string(cap) + " modes");
      }
      Valuation v;
      enumerate(t, names, candidates, 0, v, out);
      if (out.size() > cap) throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(cap) + " modes");
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<std::size_t> transition_index(const std::string& name) const {
    return schema_.find_transition(name);
  }

  const std::map<std::string, std::string>& variables(std::size_t t) const {
    return info_[t].variables;
  }

  std::optional<Marking> fire(const Marking& m, const Mode& mode) const {
    auto t = transition_index(mode.transition);
    if (!t) return std::nullopt;
    const auto& vars = info_[*t].variables;
    if (vars.size() != mode.valuation.size()) return std::nullopt;
    for (const auto& [k, _] : mode.valuation)
      if (!vars.count(k)) return std::nullopt;
    auto e = effect(*t, mode.valuation);
    if (!e || !fits(*e, m)) return std::nullopt;
    Marking next = m;
    for (const auto& [place, ms] : e->consumed) subtract(next.tokens[place], ms);
    for (const auto& [place, ms] : e->produced)
      for (const auto& [a, k] : ms) add(next.tokens[place], a, k);
    return next;
  }

 private:
  std::vector<Atom> candidates_for(const TransitionInfo& ti, const std::string& var,
                                   const std::string& sort, const Marking& m) const {
    std::optional<std::set<Atom>> narrowed;
    for (const Arc* a : ti.inputs) {
      if (a->inscription.kind() != TermKind::Variable || a->inscription.name() != var) continue;
      std::set<Atom> here;
      auto it = m.tokens.find(schema_.places[a->place].name);
      if (it != m.tokens.end())
        for (const auto& [atom, _] : it->second) here.insert(atom);
      if (!narrowed) {
        narrowed = std::move(here);
      } else {
        std::set<Atom> both;
        std::set_intersection(narrowed->begin(), narrowed->end(), here.begin(), here.end(),
                              std::inserter(both, both.end()));
        narrowed = std::move(both);
      }
    }
    const auto& carrier = structure_.carrier(sort);
    if (!narrowed) return {carrier.begin(), carrier.end()};
    std::vector<Atom> out;
    for (const auto& a : *narrowed)
      if (carrier.count(a)) out.push_back(a);
    return out;
  }

  void search(std::size_t t, const std::vector<std::string>& names,
              const std::vector<std::vector<Atom>>& candidates, std::size_t i, Valuation& v,
              const Marking& m, std::vector<Mode>& out) const {
    if (i == names.size()) {
      auto e = effect(t, v);
      if (e && fits(*e, m)) out.push_back(Mode{schema_.transitions[t].name, v});
      return;
    }
    for (const auto& a : candidates[i]) {
      v[names[i]] = a;
      search(t, names, candidates, i + 1, v, m, out);
    }
    v.erase(names[i]);
  }

  void enumerate(std::size_t t, const std::vector<std::string>& names,
                 const std::vector<std::vector<Atom>>& candidates, std::size_t i, Valuation& v,
                 std::vector<Mode>& out) const {
    if (i == names.size()) {
      if (effect(t, v)) out.push_back(Mode{schema_.transitions[t].name, v});
      return;
    }
    for (const auto& a : candidates[i]) {
      v[names[i]] = a;
      enumerate(t, names, candidates, i + 1, v, out);
    }
    v.erase(names[i]);
  }

  const NetSchema& schema_;
  const Structure& structure_;
  std::vector<TransitionInfo> info_;
  std::vector<std::size_t> order_;
};

}  // namespace

NetInstance instantiate(const NetSchema& schema, const StructurePtr& structure) {
  if (!structure || !structure->signature || !schema.signature ||
      !(*structure->signature == *schema.signature))
    throw Error(ErrorCode::SignatureMismatch, "structure and net schema use different signatures");
  if (auto d = validate_structure(*structure); has_errors(d))
    throw Error(ErrorCode::InvalidStructure, "structure '" + structure->name + "': " + d.front().message);
  if (auto d = validate_schema(schema, true); has_errors(d))
    throw Error(ErrorCode::InvalidSchema, d.front().message);

  NetInstance inst{schema, structure, {}};
  for (const auto& p : schema.places) {
    Multiset& ms = inst.marking.tokens[p.name];
    if (!p.init) continue;
    if (p.init->kind() == TermKind::Elm) {
      for (const auto& a : expand_elm(p.init->name(), *structure)) add(ms, a);
    } else {
      auto v = eval_term(*p.init, *structure, {});
      if (!v)
        throw Error(ErrorCode::InvalidStructure,
                    "initial inscription of '" + p.name + "' is undefined under " + structure->name);
      add(ms, *v);
    }
  }
  return inst;
}

std::vector<Mode> enabled_modes(const NetInstance& inst) {
  return TokenGame(inst.schema, *inst.structure).enabled(inst.marking);
}

std::vector<Mode> enabled_modes(const NetInstance& inst, const Marking& marking) {
  return TokenGame(inst.schema, *inst.structure).enabled(marking);
}

std::optional<Marking> fire(const NetInstance& inst, const Marking& marking, const Mode& mode) {
  return TokenGame(inst.schema, *inst.structure).fire(marking, mode);
}

std::vector<Mode> all_modes(const NetInstance& inst, std::size_t cap) {
  return TokenGame(inst.schema, *inst.structure).all(cap);
}

std::optional<ModeEffect> mode_effect(const NetInstance& inst, const Mode& mode) {
  TokenGame game(inst.schema, *inst.structure);
  auto t = game.transition_index(mode.transition);
  if (!t) return std::nullopt;
  return game.effect(*t, mode.valuation);
}

NetInstance fire(const NetInstance& inst, const Mode& mode) {
  auto next = TokenGame(inst.schema, *inst.structure).fire(inst.marking, mode);
  if (!next) throw Error(ErrorCode::NotEnabled, "mode " + format_mode(mode) + " is not enabled");
  NetInstance out = inst;
  out.marking = std::move(*next);
  return out;
}

ReachabilityGraph reachable_markings(const NetInstance& inst, std::size_t bound) {
  if (bound == 0) throw Error(ErrorCode::BoundExceeded, "bound must be positive");
  TokenGame game(inst.schema, *inst.structure);
  ReachabilityGraph g;
  std::map<Marking, std::size_t> index;
  g.markings.push_back(inst.marking);
  index.emplace(inst.marking, 0);
  for (std::size_t cur = 0; cur < g.markings.size(); ++cur) {
    const Marking m = g.markings[cur];
    for (const auto& mode : game.enabled(m)) {
      auto next = game.fire(m, mode);
      auto [it, fresh] = index.emplace(*next, g.markings.size());
      if (fresh) {
        if (g.markings.size() + 1 > bound)
          throw Error(ErrorCode::BoundExceeded,
                      "more than " + std::to_string(bound) + " reachable markings");
        g.markings.push_back(*next);
      }
      g.edges.push_back({cur, it->second, mode});
    }
  }
  return g;
}

}  // namespace hkl
