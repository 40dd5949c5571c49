#include "hkl/calculus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "canonical.hpp"
#include "hkl/error.hpp"

namespace hkl {

std::string to_string(ElementKind k) { return k == ElementKind::Place ? "place" : "transition"; }

InteriorKind interior_kind(const Interior& i) { return static_cast<InteriorKind>(i.index()); }

std::string to_string(InteriorKind k) {
  switch (k) {
    case InteriorKind::Abstract: return "abstract";
    case InteriorKind::Schema: return "schema";
    case InteriorKind::Instance: return "instance";
    case InteriorKind::Run: return "run";
  }
  return "?";
}

namespace {

std::size_t place_count(const Interior& i) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NetSchema>) return x.places.size();
        else if constexpr (std::is_same_v<T, NetInstance>) return x.schema.places.size();
        else if constexpr (std::is_same_v<T, Run>) return x.conditions.size();
        else return 0;
      },
      i);
}

std::size_t transition_count(const Interior& i) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NetSchema>) return x.transitions.size();
        else if constexpr (std::is_same_v<T, NetInstance>) return x.schema.transitions.size();
        else if constexpr (std::is_same_v<T, Run>) return x.events.size();
        else return 0;
      },
      i);
}

const NetSchema* schema_of(const Interior& i) {
  if (auto s = std::get_if<NetSchema>(&i)) return s;
  if (auto s = std::get_if<NetInstance>(&i)) return &s->schema;
  return nullptr;
}

Diagnostic diag(std::string code, std::string subject, std::string message) {
  return Diagnostic{Severity::Error, std::move(code), std::move(subject), std::move(message), {}};
}

}  // namespace

std::size_t interior_size(const Interior& i) { return place_count(i) + transition_count(i); }

std::vector<std::string> labels(const std::vector<InterfaceElement>& side) {
  std::vector<std::string> out;
  for (const auto& e : side) out.push_back(e.label);
  std::sort(out.begin(), out.end());
  return out;
}

Diagnostics validate_module(const Module& m) {
  Diagnostics out;
  const bool abstract = std::holds_alternative<Abstract>(m.interior);
  const NetSchema* schema = schema_of(m.interior);
  auto check_side = [&](const std::vector<InterfaceElement>& side, const char* which) {
    std::set<std::string> seen;
    for (const auto& e : side) {
      if (!seen.insert(e.label).second)
        out.push_back(diag("duplicate-label", e.label,
                           std::string("label '") + e.label + "' occurs twice in the " + which +
                               " interface of '" + m.name + "'"));
      if (e.kind == ElementKind::Transition && e.sort)
        out.push_back(diag("binding", e.label, "transition element '" + e.label + "' cannot carry a sort"));
      if (!e.node) continue;
      if (abstract) {
        out.push_back(diag("abstract-binding", e.label,
                           "abstract module '" + m.name + "' binds interface element '" + e.label + "'"));
        continue;
      }
      std::size_t limit = e.kind == ElementKind::Place ? place_count(m.interior) : transition_count(m.interior);
      if (*e.node >= limit) {
        out.push_back(diag("binding", e.label,
                           "interface element '" + e.label + "' is bound to a missing " + to_string(e.kind)));
        continue;
      }
      if (schema && e.kind == ElementKind::Place && e.sort && schema->places[*e.node].sort != *e.sort)
        out.push_back(diag("binding-sort", e.label,
                           "interface place '" + e.label + "' has sort " + *e.sort + " but is bound to '" +
                               schema->places[*e.node].name + "' of sort " + schema->places[*e.node].sort));
    }
  };
  check_side(m.left, "left");
  check_side(m.right, "right");
  return out;
}

Module make_module(Module m) {
  auto d = validate_module(m);
  if (!d.empty()) {
    ErrorCode code = d.front().code == "duplicate-label" ? ErrorCode::DuplicateLabel : ErrorCode::InvalidModule;
    throw Error(code, d.front().message);
  }
  return m;
}

namespace {

/// Union-find over the disjoint union of two node ranges; classes are
/// numbered by first appearance so a's nodes keep their relative order.
class Fusion {
 public:
  Fusion(std::size_t na, std::size_t nb) : na_(na), parent_(na + nb) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  void unite(std::size_t a_node, std::size_t b_node) {
    std::size_t x = find(a_node), y = find(na_ + b_node);
    if (x == y) return;
    if (y < x) std::swap(x, y);
    parent_[y] = x;
  }

  /// new index for every combined old index, plus the members per class.
  void finish() {
    index_.assign(parent_.size(), 0);
    std::vector<std::size_t> class_of(parent_.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      std::size_t r = find(i);
      if (class_of[r] == static_cast<std::size_t>(-1)) {
        class_of[r] = members_.size();
        members_.emplace_back();
      }
      index_[i] = class_of[r];
      members_[class_of[r]].push_back(i);
    }
  }

  std::size_t from_a(std::size_t i) const { return index_[i]; }
  std::size_t from_b(std::size_t i) const { return index_[na_ + i]; }
  std::size_t size() const { return members_.size(); }
  const std::vector<std::size_t>& members(std::size_t cls) const { return members_[cls]; }
  bool is_a(std::size_t combined) const { return combined < na_; }
  std::size_t local(std::size_t combined) const { return combined < na_ ? combined : combined - na_; }

 private:
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }

  std::size_t na_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> index_;
  std::vector<std::vector<std::size_t>> members_;
};

struct FusedPair {
  const InterfaceElement* right;  // from a
  const InterfaceElement* left;   // from b
};

struct Merged {
  Interior interior;
  // old node -> new node, per operand and kind
  std::vector<std::size_t> a_places, a_transitions, b_places, b_transitions;
};

void unite_pairs(Fusion& places, Fusion& transitions, const std::vector<FusedPair>& pairs) {
  for (const auto& p : pairs) {
    if (!p.right->node || !p.left->node) continue;
    (p.right->kind == ElementKind::Place ? places : transitions).unite(*p.right->node, *p.left->node);
  }
}

std::vector<std::size_t> mapping(const Fusion& f, std::size_t n, bool a) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a ? f.from_a(i) : f.from_b(i);
  return out;
}

std::string fresh_name(const std::string& base, std::set<std::string>& used) {
  if (used.insert(base).second) return base;
  for (std::size_t k = 1;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (used.insert(candidate).second) return candidate;
  }
}

/// Merges two schemas; also reports how place names were assigned so that
/// instance markings can follow.
NetSchema merge_schemas(const NetSchema& a, const NetSchema& b, const Fusion& pf, const Fusion& tf) {
  if (!a.signature || !b.signature || !(*a.signature == *b.signature))
    throw Error(ErrorCode::SignatureMismatch, "composed nets use different signatures");
  NetSchema out;
  out.signature = a.signature;
  std::set<std::string> used;

  auto place_at = [&](std::size_t combined) -> const Place& {
    return pf.is_a(combined) ? a.places[pf.local(combined)] : b.places[pf.local(combined)];
  };
  auto transition_at = [&](std::size_t combined) -> const Transition& {
    return tf.is_a(combined) ? a.transitions[tf.local(combined)] : b.transitions[tf.local(combined)];
  };

  for (std::size_t c = 0; c < pf.size(); ++c) {
    const auto& ms = pf.members(c);
    Place p = place_at(ms.front());
    for (std::size_t k = 1; k < ms.size(); ++k) {
      const Place& q = place_at(ms[k]);
      if (q.sort != p.sort)
        throw Error(ErrorCode::SortMismatch, "fused places '" + p.name + "' and '" + q.name +
                                                 "' have sorts " + p.sort + " and " + q.sort);
      if (q.init != p.init)
        throw Error(ErrorCode::InscriptionMismatch, "fused places '" + p.name + "' and '" + q.name +
                                                        "' have different initial inscriptions");
    }
    out.places.push_back(std::move(p));
  }
  for (std::size_t c = 0; c < tf.size(); ++c) {
    const auto& ms = tf.members(c);
    Transition t = transition_at(ms.front());
    std::vector<Term> guards;
    for (std::size_t m : ms)
      if (const auto& g = transition_at(m).guard) guards.push_back(*g);
    if (!guards.empty()) t.guard = Term::conjunction(std::move(guards));
    out.transitions.push_back(std::move(t));
  }
  for (auto& p : out.places) p.name = fresh_name(p.name, used);
  for (auto& t : out.transitions) t.name = fresh_name(t.name, used);

  for (const auto& arc : a.arcs)
    out.arcs.push_back(Arc{pf.from_a(arc.place), tf.from_a(arc.transition), arc.direction, arc.inscription});
  for (const auto& arc : b.arcs)
    out.arcs.push_back(Arc{pf.from_b(arc.place), tf.from_b(arc.transition), arc.direction, arc.inscription});
  return out;
}

Merged merge_interiors(const Interior& ia, const Interior& ib, const std::vector<FusedPair>& pairs) {
  Fusion pf(place_count(ia), place_count(ib));
  Fusion tf(transition_count(ia), transition_count(ib));
  unite_pairs(pf, tf, pairs);
  pf.finish();
  tf.finish();

  Merged out{Abstract{},
             mapping(pf, place_count(ia), true),
             mapping(tf, transition_count(ia), true),
             mapping(pf, place_count(ib), false),
             mapping(tf, transition_count(ib), false)};

  if (const auto* sa = std::get_if<NetSchema>(&ia)) {
    out.interior = merge_schemas(*sa, std::get<NetSchema>(ib), pf, tf);
  } else if (const auto* na = std::get_if<NetInstance>(&ia)) {
    const auto& nb = std::get<NetInstance>(ib);
    if (!na->structure || !nb.structure || !(*na->structure == *nb.structure))
      throw Error(ErrorCode::SignatureMismatch, "composed instances use different structures");
    NetInstance inst{merge_schemas(na->schema, nb.schema, pf, tf), na->structure, {}};
    for (std::size_t c = 0; c < pf.size(); ++c) {
      const auto& ms = pf.members(c);
      auto tokens_of = [&](std::size_t combined) {
        const NetInstance& src = pf.is_a(combined) ? *na : nb;
        const std::string& name = src.schema.places[pf.local(combined)].name;
        auto it = src.marking.tokens.find(name);
        return it == src.marking.tokens.end() ? Multiset{} : it->second;
      };
      Multiset ms0 = tokens_of(ms.front());
      for (std::size_t k = 1; k < ms.size(); ++k)
        if (tokens_of(ms[k]) != ms0)
          throw Error(ErrorCode::InscriptionMismatch,
                      "fused place '" + inst.schema.places[c].name + "' has different markings");
      inst.marking.tokens[inst.schema.places[c].name] = std::move(ms0);
    }
    out.interior = std::move(inst);
  } else if (const auto* ra = std::get_if<Run>(&ia)) {
    const auto& rb = std::get<Run>(ib);
    Run run;
    for (std::size_t c = 0; c < pf.size(); ++c) {
      const auto& ms = pf.members(c);
      auto cond_at = [&](std::size_t combined) -> const Condition& {
        return pf.is_a(combined) ? ra->conditions[pf.local(combined)] : rb.conditions[pf.local(combined)];
      };
      const Condition& c0 = cond_at(ms.front());
      for (std::size_t k = 1; k < ms.size(); ++k) {
        const Condition& ck = cond_at(ms[k]);
        if (ck.place != c0.place || ck.token != c0.token)
          throw Error(ErrorCode::InscriptionMismatch, "fused conditions " + c0.place + ":" + c0.token +
                                                          " and " + ck.place + ":" + ck.token + " differ");
      }
      run.conditions.push_back(c0);
    }
    run.events.resize(tf.size());
    std::vector<bool> seeded(tf.size(), false);
    auto absorb = [&](const Event& e, std::size_t target, const std::vector<std::size_t>& cmap) {
      Event& dst = run.events[target];
      if (!seeded[target]) {
        dst.mode = e.mode;
        seeded[target] = true;
      } else if (!(dst.mode == e.mode)) {
        throw Error(ErrorCode::InscriptionMismatch, "fused events " + format_mode(dst.mode) + " and " +
                                                        format_mode(e.mode) + " differ");
      }
      for (std::size_t c : e.preset) dst.preset.push_back(cmap[c]);
      for (std::size_t c : e.postset) dst.postset.push_back(cmap[c]);
    };
    for (std::size_t i = 0; i < ra->events.size(); ++i) absorb(ra->events[i], out.a_transitions[i], out.a_places);
    for (std::size_t i = 0; i < rb.events.size(); ++i) absorb(rb.events[i], out.b_transitions[i], out.b_places);
    for (auto& e : run.events) {
      for (auto* set : {&e.preset, &e.postset}) {
        std::sort(set->begin(), set->end());
        set->erase(std::unique(set->begin(), set->end()), set->end());
      }
    }
    validate_run(run);
    normalize_occurrences(run);
    out.interior = std::move(run);
  }
  return out;
}

std::vector<FusedPair> match(const Module& a, const Module& b, Diagnostics* problems) {
  std::vector<FusedPair> pairs;
  for (const auto& r : a.right) {
    auto it = std::find_if(b.left.begin(), b.left.end(), [&](const auto& l) { return l.label == r.label; });
    if (it == b.left.end()) continue;
    if (it->kind != r.kind) {
      std::string msg = "label '" + r.label + "' is a " + to_string(r.kind) + " in '" + a.name + "' but a " +
                        to_string(it->kind) + " in '" + b.name + "'";
      if (!problems) throw Error(ErrorCode::KindMismatch, msg);
      problems->push_back(diag("kind-mismatch", r.label, msg));
      continue;
    }
    if (r.sort && it->sort && *r.sort != *it->sort) {
      std::string msg = "label '" + r.label + "' has sort " + *r.sort + " in '" + a.name + "' but " +
                        *it->sort + " in '" + b.name + "'";
      if (!problems) throw Error(ErrorCode::SortMismatch, msg);
      problems->push_back(diag("sort-mismatch", r.label, msg));
      continue;
    }
    pairs.push_back({&r, &*it});
  }
  return pairs;
}

bool matched(const std::vector<FusedPair>& pairs, const InterfaceElement& e, bool right_side) {
  return std::any_of(pairs.begin(), pairs.end(),
                     [&](const FusedPair& p) { return (right_side ? p.right : p.left) == &e; });
}

void check_mixed(const Module& a, const Module& b, Diagnostics* problems) {
  auto ka = interior_kind(a.interior), kb = interior_kind(b.interior);
  if (ka == kb || ka == InteriorKind::Abstract || kb == InteriorKind::Abstract) return;
  std::string msg = "cannot compose a " + to_string(ka) + " module with a " + to_string(kb) + " module";
  if (!problems) throw Error(ErrorCode::KindMismatch, msg);
  problems->push_back(diag("mixed-interiors", a.name + "." + b.name, msg));
}

}  // namespace

Module compose(const Module& a, const Module& b) {
  check_mixed(a, b, nullptr);
  const auto pairs = match(a, b, nullptr);

  Module c;
  c.name = a.name.empty() ? b.name : b.name.empty() ? a.name : a.name + "." + b.name;

  const bool a_abstract = std::holds_alternative<Abstract>(a.interior);
  const bool b_abstract = std::holds_alternative<Abstract>(b.interior);

  std::vector<std::size_t> ap, at, bp, bt;
  if (a_abstract && b_abstract) {
    c.interior = Abstract{};
  } else if (a_abstract || b_abstract) {
    c.interior = a_abstract ? b.interior : a.interior;
    auto ident = [](std::size_t n) {
      std::vector<std::size_t> v(n);
      std::iota(v.begin(), v.end(), 0);
      return v;
    };
    if (a_abstract) {
      bp = ident(place_count(b.interior));
      bt = ident(transition_count(b.interior));
    } else {
      ap = ident(place_count(a.interior));
      at = ident(transition_count(a.interior));
    }
  } else {
    Merged merged = merge_interiors(a.interior, b.interior, pairs);
    c.interior = std::move(merged.interior);
    ap = std::move(merged.a_places);
    at = std::move(merged.a_transitions);
    bp = std::move(merged.b_places);
    bt = std::move(merged.b_transitions);
  }

  auto remap = [](InterfaceElement e, const std::vector<std::size_t>& places,
                  const std::vector<std::size_t>& transitions) {
    if (e.node) {
      const auto& table = e.kind == ElementKind::Place ? places : transitions;
      e.node = table.empty() ? std::nullopt : std::optional<std::size_t>(table[*e.node]);
    }
    return e;
  };

  std::set<std::string> left_labels, right_labels;
  auto push = [&](std::vector<InterfaceElement>& side, std::set<std::string>& seen, InterfaceElement e,
                  const char* which) {
    if (!seen.insert(e.label).second)
      throw Error(ErrorCode::DuplicateLabel, std::string("label '") + e.label + "' would occur twice in the " +
                                                 which + " interface of " + c.name);
    side.push_back(std::move(e));
  };
  for (const auto& e : a.left) push(c.left, left_labels, remap(e, ap, at), "left");
  for (const auto& e : b.left)
    if (!matched(pairs, e, false)) push(c.left, left_labels, remap(e, bp, bt), "left");
  for (const auto& e : b.right) push(c.right, right_labels, remap(e, bp, bt), "right");
  for (const auto& e : a.right)
    if (!matched(pairs, e, true)) push(c.right, right_labels, remap(e, ap, at), "right");
  return c;
}

Composability is_composable(const Module& a, const Module& b) {
  Composability out;
  check_mixed(a, b, &out.blocking);
  const auto pairs = match(a, b, &out.blocking);
  auto dup = [&](const std::vector<InterfaceElement>& first, const std::vector<InterfaceElement>& second,
                 bool second_is_left_of_b) {
    std::set<std::string> seen;
    for (const auto& e : first) seen.insert(e.label);
    for (const auto& e : second) {
      if (second_is_left_of_b ? matched(pairs, e, false) : matched(pairs, e, true)) continue;
      bool clash_with_fused_mismatch = false;
      if (second_is_left_of_b)
        clash_with_fused_mismatch = std::any_of(a.right.begin(), a.right.end(),
                                                [&](const auto& r) { return r.label == e.label; });
      else
        clash_with_fused_mismatch = std::any_of(b.left.begin(), b.left.end(),
                                                [&](const auto& l) { return l.label == e.label; });
      if (clash_with_fused_mismatch) continue;  // already reported by match()
      if (seen.count(e.label))
        out.blocking.push_back(diag("duplicate-label", e.label,
                                    "label '" + e.label + "' would occur twice in one interface of the composite"));
    }
  };
  dup(a.left, b.left, true);
  dup(b.right, a.right, false);
  if (out.blocking.empty()) {
    try {
      compose(a, b);
    } catch (const Error& err) {
      out.blocking.push_back(diag(std::string(to_string(err.code())), a.name + "." + b.name, err.what()));
    }
  }
  out.ok = out.blocking.empty();
  return out;
}

Module rename_labels(const Module& m, const std::map<std::string, std::string>& renaming) {
  std::map<std::string, std::string> inverse;
  for (const auto& [from, to] : renaming) {
    auto [it, fresh] = inverse.emplace(to, from);
    if (!fresh)
      throw Error(ErrorCode::RenamingCollision,
                  "labels '" + it->second + "' and '" + from + "' are both renamed to '" + to + "'");
  }
  Module out = m;
  auto apply = [&](std::vector<InterfaceElement>& side, const char* which) {
    std::set<std::string> seen;
    for (auto& e : side) {
      if (auto it = renaming.find(e.label); it != renaming.end()) e.label = it->second;
      if (!seen.insert(e.label).second)
        throw Error(ErrorCode::RenamingCollision,
                    std::string("renaming makes label '") + e.label + "' occur twice in the " + which + " interface");
    }
  };
  apply(out.left, "left");
  apply(out.right, "right");
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

std::string opt_term(const std::optional<Term>& t) { return t ? t->to_string() : "-"; }

std::string multiset_string(const Multiset& ms) {
  std::string out;
  for (const auto& [a, k] : ms) out += a + "*" + std::to_string(k) + ",";
  return out;
}

void add_schema_graph(const NetSchema& s, const NetInstance* inst, detail::ColoredGraph& g) {
  for (const auto& p : s.places) {
    std::string color = "P|" + p.sort + "|" + opt_term(p.init);
    if (inst) {
      auto it = inst->marking.tokens.find(p.name);
      color += "|" + (it == inst->marking.tokens.end() ? std::string() : multiset_string(it->second));
    }
    g.colors.push_back(std::move(color));
  }
  for (const auto& t : s.transitions) g.colors.push_back("T|" + opt_term(t.guard));
  const std::size_t np = s.places.size();
  for (const auto& a : s.arcs) {
    if (a.direction == ArcDirection::PlaceToTransition)
      g.edges.push_back({a.place, np + a.transition, "in:" + a.inscription.to_string()});
    else
      g.edges.push_back({np + a.transition, a.place, "out:" + a.inscription.to_string()});
  }
}

void add_run_graph(const Run& r, detail::ColoredGraph& g) {
  for (const auto& c : r.conditions) g.colors.push_back("C|" + c.place + "|" + c.token);
  for (const auto& e : r.events)
    g.colors.push_back("E|" + e.mode.transition + "|" + format_valuation(e.mode.valuation));
  const std::size_t nc = r.conditions.size();
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    for (std::size_t c : r.events[i].preset) g.edges.push_back({c, nc + i, "pre"});
    for (std::size_t c : r.events[i].postset) g.edges.push_back({nc + i, c, "post"});
  }
}

NetSchema rebuild_schema(const NetSchema& s, const std::vector<std::size_t>& place_pos,
                         const std::vector<std::size_t>& transition_pos) {
  NetSchema out;
  out.signature = s.signature;
  out.places.resize(s.places.size());
  out.transitions.resize(s.transitions.size());
  for (std::size_t i = 0; i < s.places.size(); ++i) {
    out.places[place_pos[i]] = s.places[i];
    out.places[place_pos[i]].name = "p" + std::to_string(place_pos[i]);
  }
  for (std::size_t i = 0; i < s.transitions.size(); ++i) {
    out.transitions[transition_pos[i]] = s.transitions[i];
    out.transitions[transition_pos[i]].name = "t" + std::to_string(transition_pos[i]);
  }
  for (const auto& a : s.arcs)
    out.arcs.push_back(Arc{place_pos[a.place], transition_pos[a.transition], a.direction, a.inscription});
  std::sort(out.arcs.begin(), out.arcs.end(), [](const Arc& x, const Arc& y) {
    return std::make_tuple(x.place, x.transition, x.direction, x.inscription.to_string()) <
           std::make_tuple(y.place, y.transition, y.direction, y.inscription.to_string());
  });
  return out;
}

}  // namespace

Module canonical_form(const Module& m) {
  detail::ColoredGraph g;
  const NetSchema* schema = schema_of(m.interior);
  const auto* inst = std::get_if<NetInstance>(&m.interior);
  const auto* run = std::get_if<Run>(&m.interior);
  if (schema) add_schema_graph(*schema, inst, g);
  if (run) add_run_graph(*run, g);
  const std::size_t np = place_count(m.interior);

  std::vector<std::vector<std::string>> tags(g.colors.size());
  for (const auto* side : {&m.left, &m.right}) {
    const char* tag = side == &m.left ? "|L:" : "|R:";
    for (const auto& e : *side)
      if (e.node) tags[e.kind == ElementKind::Place ? *e.node : np + *e.node].push_back(tag + e.label);
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    std::sort(tags[i].begin(), tags[i].end());
    for (const auto& t : tags[i]) g.colors[i] += t;
  }

  const auto order = detail::canonical_order(g);
  std::vector<std::size_t> position(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  // Rank places and transitions separately by canonical position.
  std::vector<std::size_t> place_pos(np), transition_pos(order.size() - np);
  {
    std::vector<std::size_t> ps(np), ts(order.size() - np);
    std::iota(ps.begin(), ps.end(), 0);
    std::iota(ts.begin(), ts.end(), 0);
    std::sort(ps.begin(), ps.end(), [&](auto x, auto y) { return position[x] < position[y]; });
    std::sort(ts.begin(), ts.end(), [&](auto x, auto y) { return position[np + x] < position[np + y]; });
    for (std::size_t i = 0; i < ps.size(); ++i) place_pos[ps[i]] = i;
    for (std::size_t i = 0; i < ts.size(); ++i) transition_pos[ts[i]] = i;
  }

  Module out;
  if (std::holds_alternative<Abstract>(m.interior)) {
    out.interior = Abstract{};
  } else if (const auto* s = std::get_if<NetSchema>(&m.interior)) {
    out.interior = rebuild_schema(*s, place_pos, transition_pos);
  } else if (inst) {
    NetInstance ni{rebuild_schema(inst->schema, place_pos, transition_pos), inst->structure, {}};
    for (std::size_t i = 0; i < inst->schema.places.size(); ++i) {
      auto it = inst->marking.tokens.find(inst->schema.places[i].name);
      ni.marking.tokens[ni.schema.places[place_pos[i]].name] =
          it == inst->marking.tokens.end() ? Multiset{} : it->second;
    }
    out.interior = std::move(ni);
  } else if (run) {
    Run r;
    r.conditions.resize(run->conditions.size());
    r.events.resize(run->events.size());
    for (std::size_t i = 0; i < run->conditions.size(); ++i) r.conditions[place_pos[i]] = run->conditions[i];
    for (std::size_t i = 0; i < run->events.size(); ++i) {
      Event e = run->events[i];
      for (auto& c : e.preset) c = place_pos[c];
      for (auto& c : e.postset) c = place_pos[c];
      std::sort(e.preset.begin(), e.preset.end());
      std::sort(e.postset.begin(), e.postset.end());
      r.events[transition_pos[i]] = std::move(e);
    }
    std::map<std::pair<std::string, Atom>, std::size_t> seen;
    for (auto& c : r.conditions) c.occurrence = seen[{c.place, c.token}]++;
    out.interior = std::move(r);
  }

  auto remap_side = [&](const std::vector<InterfaceElement>& side) {
    std::vector<InterfaceElement> res = side;
    for (auto& e : res)
      if (e.node) e.node = e.kind == ElementKind::Place ? place_pos[*e.node] : transition_pos[*e.node];
    std::sort(res.begin(), res.end(), [](const auto& x, const auto& y) { return x.label < y.label; });
    return res;
  };
  out.left = remap_side(m.left);
  out.right = remap_side(m.right);
  return out;
}

}  // namespace hkl
