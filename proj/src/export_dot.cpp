#include <sstream>

#include "hkl/export.hpp"

namespace hkl {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

std::string tokens_text(const Multiset& ms) {
  std::string out;
  for (const auto& [atom, n] : ms) {
    if (!out.empty()) out += ", ";
    out += n == 1 ? atom : std::to_string(n) + "'" + atom;
  }
  return out;
}

class DotWriter {
 public:
  explicit DotWriter(const std::string& name) {
    os_ << "digraph " << quoted(name) << " {\n  rankdir=LR;\n";
  }

  void node(const std::string& id, const std::string& label, const char* shape, const char* extra = "") {
    os_ << "  " << id << " [shape=" << shape << ", label=" << quoted(label) << extra << "];\n";
  }

  void edge(const std::string& from, const std::string& to, const std::string& label = "",
            const char* extra = "") {
    os_ << "  " << from << " -> " << to;
    if (!label.empty() || *extra) {
      os_ << " [";
      if (!label.empty()) os_ << "label=" << quoted(label);
      os_ << extra << "]";
    }
    os_ << ";\n";
  }

  void rank(const char* which, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    os_ << "  { rank=" << which << ";";
    for (const auto& id : ids) os_ << ' ' << id << ';';
    os_ << " }\n";
  }

  std::string finish() {
    os_ << "}\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
};

void schema_body(DotWriter& w, const NetSchema& s, const Marking* marking) {
  for (std::size_t i = 0; i < s.places.size(); ++i) {
    const Place& p = s.places[i];
    std::string label = p.name + " : " + p.sort;
    if (marking) {
      auto it = marking->tokens.find(p.name);
      if (it != marking->tokens.end() && !it->second.empty()) label += "\n{" + tokens_text(it->second) + "}";
    } else if (p.init) {
      label += "\n" + p.init->to_string();
    }
    w.node("p" + std::to_string(i), label, "ellipse");
  }
  for (std::size_t i = 0; i < s.transitions.size(); ++i) {
    const Transition& t = s.transitions[i];
    w.node("t" + std::to_string(i), t.guard ? t.name + "\n[" + t.guard->to_string() + "]" : t.name, "box");
  }
  for (const auto& a : s.arcs) {
    std::string p = "p" + std::to_string(a.place), t = "t" + std::to_string(a.transition);
    if (a.direction == ArcDirection::PlaceToTransition) w.edge(p, t, a.inscription.to_string());
    else w.edge(t, p, a.inscription.to_string());
  }
}

void run_body(DotWriter& w, const Run& r) {
  for (std::size_t i = 0; i < r.conditions.size(); ++i) {
    const Condition& c = r.conditions[i];
    w.node("c" + std::to_string(i), c.place + ":" + c.token, "ellipse");
  }
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const Mode& m = r.events[i].mode;
    std::string label = m.transition;
    if (!m.valuation.empty()) label += "\n" + format_valuation(m.valuation);
    w.node("e" + std::to_string(i), label, "box");
  }
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    for (auto c : r.events[i].preset) w.edge("c" + std::to_string(c), "e" + std::to_string(i));
    for (auto c : r.events[i].postset) w.edge("e" + std::to_string(i), "c" + std::to_string(c));
  }
}

}  // namespace

std::string export_dot(const Module& m) {
  DotWriter w(m.name.empty() ? "module" : m.name);
  const char* placePrefix = "p";
  const char* transitionPrefix = "t";
  if (const auto* s = std::get_if<NetSchema>(&m.interior)) {
    schema_body(w, *s, nullptr);
  } else if (const auto* inst = std::get_if<NetInstance>(&m.interior)) {
    schema_body(w, inst->schema, &inst->marking);
  } else if (const auto* r = std::get_if<Run>(&m.interior)) {
    run_body(w, *r);
    placePrefix = "c";
    transitionPrefix = "e";
  }
  auto side = [&](const std::vector<InterfaceElement>& elems, const char* prefix, bool left) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const InterfaceElement& e = elems[i];
      std::string id = prefix + std::to_string(i);
      std::string label = e.sort ? e.label + " : " + *e.sort : e.label;
      w.node(id, label, e.kind == ElementKind::Place ? "ellipse" : "box", ", style=dashed");
      ids.push_back(id);
      if (e.node) {
        std::string inner = (e.kind == ElementKind::Place ? placePrefix : transitionPrefix) + std::to_string(*e.node);
        if (left) w.edge(id, inner, "", "style=dotted, arrowhead=none");
        else w.edge(inner, id, "", "style=dotted, arrowhead=none");
      }
    }
    w.rank(left ? "min" : "max", ids);
  };
  side(m.left, "l", true);
  side(m.right, "r", false);
  return w.finish();
}

std::string export_dot(const NetInstance& inst) {
  DotWriter w("instance");
  schema_body(w, inst.schema, &inst.marking);
  return w.finish();
}

std::string export_dot(const Run& r) {
  DotWriter w("run");
  run_body(w, r);
  return w.finish();
}

std::string export_dot(const ReachabilityGraph& g) {
  DotWriter w("reachability");
  for (std::size_t i = 0; i < g.markings.size(); ++i)
    w.node("m" + std::to_string(i), format_marking(g.markings[i]), "note", i == 0 ? ", peripheries=2" : "");
  for (const auto& e : g.edges)
    w.edge("m" + std::to_string(e.from), "m" + std::to_string(e.to), format_mode(e.mode));
  return w.finish();
}

}  // namespace hkl
