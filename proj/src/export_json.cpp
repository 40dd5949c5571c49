#include <algorithm>
#include <initializer_list>
#include <set>

#include "hkl/error.hpp"
#include "json_codec.hpp"

namespace hkl {

namespace detail {

json envelope(const std::string& kind, json body) {
  json j;
  j["formatVersion"] = kFormatVersion;
  j["kind"] = kind;
  j["body"] = std::move(body);
  return j;
}

json marking_json(const Marking& m) {
  json j = json::object();
  for (const auto& [place, ms] : m.tokens) {
    json tokens = json::array();
    for (const auto& [atom, n] : ms)
      for (std::size_t k = 0; k < n; ++k) tokens.push_back(atom);
    j[place] = std::move(tokens);
  }
  return j;
}

json mode_json(const Mode& m) {
  json v = json::object();
  for (const auto& [var, atom] : m.valuation) v[var] = atom;
  return json{{"transition", m.transition}, {"valuation", std::move(v)}};
}

json term_json(const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
      return json{{"var", t.name()}, {"sort", t.sort()}};
    case TermKind::Constant:
      return json{{"const", t.name()}};
    case TermKind::Elm:
      return json{{"elm", t.name()}};
    case TermKind::Application:
    case TermKind::Equal:
    case TermKind::NotEqual:
    case TermKind::And: {
      json args = json::array();
      for (const auto& a : t.args()) args.push_back(term_json(a));
      const char* key = t.kind() == TermKind::Application ? "app" : "op";
      std::string name = t.kind() == TermKind::And ? "&&" : t.name();
      return json{{key, name}, {"args", std::move(args)}};
    }
  }
  return json();
}

json signature_json(const Signature& sig) {
  json j;
  j["name"] = sig.name;
  j["sorts"] = sig.sorts;
  auto symbols = [](const auto& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(json{{"name", x.name}, {"sort", x.sort}});
    return a;
  };
  j["sets"] = symbols(sig.sets);
  j["constants"] = symbols(sig.constants);
  json fns = json::array();
  for (const auto& f : sig.functions)
    fns.push_back(json{{"name", f.name}, {"args", f.argSorts}, {"result", f.resultSort}});
  j["functions"] = std::move(fns);
  json reqs = json::array();
  for (const auto& r : sig.requirements) reqs.push_back(json{{"kind", to_string(r.kind)}, {"subject", r.subject}});
  j["requirements"] = std::move(reqs);
  return j;
}

json structure_json(const Structure& st) {
  json j;
  j["name"] = st.name;
  j["signature"] = signature_json(*st.signature);
  auto atom_map = [](const std::map<std::string, std::set<Atom>>& m) {
    json o = json::object();
    for (const auto& [k, atoms] : m) o[k] = std::vector<Atom>(atoms.begin(), atoms.end());
    return o;
  };
  j["carriers"] = atom_map(st.carriers);
  j["sets"] = atom_map(st.sets);
  json consts = json::object();
  for (const auto& [k, v] : st.constants) consts[k] = v;
  j["constants"] = std::move(consts);
  json fns = json::object();
  for (const auto& [name, table] : st.functions) {
    json entries = json::array();
    for (const auto& [args, result] : table) entries.push_back(json{{"args", args}, {"result", result}});
    fns[name] = std::move(entries);
  }
  j["functions"] = std::move(fns);
  return j;
}

}  // namespace detail

namespace {

using detail::json;

json schema_json(const NetSchema& s) {
  json j;
  j["signature"] = detail::signature_json(*s.signature);
  json places = json::array();
  for (const auto& p : s.places)
    places.push_back(json{{"name", p.name}, {"sort", p.sort}, {"init", p.init ? detail::term_json(*p.init) : json()}});
  j["places"] = std::move(places);
  json transitions = json::array();
  for (const auto& t : s.transitions)
    transitions.push_back(json{{"name", t.name}, {"guard", t.guard ? detail::term_json(*t.guard) : json()}});
  j["transitions"] = std::move(transitions);
  json arcs = json::array();
  for (const auto& a : s.arcs)
    arcs.push_back(json{{"place", s.places[a.place].name},
                        {"transition", s.transitions[a.transition].name},
                        {"direction", a.direction == ArcDirection::PlaceToTransition ? "in" : "out"},
                        {"inscription", detail::term_json(a.inscription)}});
  j["arcs"] = std::move(arcs);
  return j;
}

json instance_json(const NetInstance& inst) {
  json j;
  j["schema"] = schema_json(inst.schema);
  j["structure"] = detail::structure_json(*inst.structure);
  j["marking"] = detail::marking_json(inst.marking);
  return j;
}

json run_json(const Run& r) {
  json conds = json::array();
  for (const auto& c : r.conditions)
    conds.push_back(json{{"place", c.place}, {"token", c.token}, {"occurrence", c.occurrence}});
  json events = json::array();
  for (const auto& e : r.events)
    events.push_back(json{{"mode", detail::mode_json(e.mode)}, {"preset", e.preset}, {"postset", e.postset}});
  return json{{"conditions", std::move(conds)}, {"events", std::move(events)}};
}

json side_json(const std::vector<InterfaceElement>& side) {
  json a = json::array();
  for (const auto& e : side)
    a.push_back(json{{"label", e.label},
                     {"kind", to_string(e.kind)},
                     {"sort", e.sort ? json(*e.sort) : json()},
                     {"node", e.node ? json(*e.node) : json()}});
  return a;
}

json module_json(const Module& m) {
  json interior;
  InteriorKind k = interior_kind(m.interior);
  interior["kind"] = to_string(k);
  switch (k) {
    case InteriorKind::Abstract: interior["value"] = json(); break;
    case InteriorKind::Schema: interior["value"] = schema_json(std::get<NetSchema>(m.interior)); break;
    case InteriorKind::Instance: interior["value"] = instance_json(std::get<NetInstance>(m.interior)); break;
    case InteriorKind::Run: interior["value"] = run_json(std::get<Run>(m.interior)); break;
  }
  json j;
  j["name"] = m.name;
  j["left"] = side_json(m.left);
  j["right"] = side_json(m.right);
  j["interior"] = std::move(interior);
  return j;
}

json graph_json(const ReachabilityGraph& g) {
  json nodes = json::array();
  for (std::size_t i = 0; i < g.markings.size(); ++i)
    nodes.push_back(json{{"id", i}, {"marking", detail::marking_json(g.markings[i])}});
  json edges = json::array();
  for (const auto& e : g.edges) {
    json mode = detail::mode_json(e.mode);
    edges.push_back(
        json{{"from", e.from}, {"to", e.to}, {"transition", mode["transition"]}, {"valuation", mode["valuation"]}});
  }
  return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

json trace_json(const Trace& t) {
  json a = json::array();
  for (const auto& m : t) a.push_back(detail::mode_json(m));
  return a;
}

std::string dump(const std::string& kind, json body) { return detail::envelope(kind, std::move(body)).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Import

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::Format, msg); }

/// Checks that `j` is an object whose keys are exactly `keys`.
const json& object(const json& j, std::initializer_list<const char*> keys, const char* what) {
  if (!j.is_object()) bad(std::string(what) + " must be an object");
  for (const char* k : keys)
    if (!j.contains(k)) bad(std::string(what) + " lacks key '" + k + "'");
  for (const auto& [k, v] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
      bad(std::string(what) + " has unknown key '" + k + "'");
  return j;
}

std::string str(const json& j, const char* what) {
  if (!j.is_string()) bad(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::size_t index(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    bad(std::string(what) + " must be a non-negative integer");
  return j.get<std::size_t>();
}

const json& array(const json& j, const char* what) {
  if (!j.is_array()) bad(std::string(what) + " must be an array");
  return j;
}

std::vector<std::string> strings(const json& j, const char* what) {
  std::vector<std::string> out;
  for (const auto& x : array(j, what)) out.push_back(str(x, what));
  return out;
}

const json& body(std::string_view text, const std::string& kind) {
  static thread_local json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  object(doc, {"formatVersion", "kind", "body"}, "document");
  if (!doc["formatVersion"].is_number_integer() || doc["formatVersion"].get<int>() != kFormatVersion)
    bad("unsupported formatVersion");
  if (str(doc["kind"], "kind") != kind) bad("expected kind '" + kind + "', found '" + doc["kind"].get<std::string>() + "'");
  return doc["body"];
}

Signature read_signature(const json& j) {
  object(j, {"name", "sorts", "sets", "constants", "functions", "requirements"}, "signature");
  Signature sig;
  sig.name = str(j["name"], "signature name");
  sig.sorts = strings(j["sorts"], "sorts");
  for (const auto& s : array(j["sets"], "sets")) {
    object(s, {"name", "sort"}, "set symbol");
    sig.sets.push_back({str(s["name"], "name"), str(s["sort"], "sort")});
  }
  for (const auto& c : array(j["constants"], "constants")) {
    object(c, {"name", "sort"}, "constant symbol");
    sig.constants.push_back({str(c["name"], "name"), str(c["sort"], "sort")});
  }
  for (const auto& f : array(j["functions"], "functions")) {
    object(f, {"name", "args", "result"}, "function symbol");
    sig.functions.push_back({str(f["name"], "name"), strings(f["args"], "args"), str(f["result"], "result")});
  }
  for (const auto& r : array(j["requirements"], "requirements")) {
    object(r, {"kind", "subject"}, "requirement");
    std::string k = str(r["kind"], "kind");
    RequirementKind kind = k == "injective" ? RequirementKind::Injective
                           : k == "partial" ? RequirementKind::Partial
                           : k == "total"   ? RequirementKind::Total
                                            : (bad("unknown requirement kind '" + k + "'"), RequirementKind::Total);
    sig.requirements.push_back({kind, str(r["subject"], "subject")});
  }
  if (has_errors(validate_signature(sig))) bad("signature '" + sig.name + "' is invalid");
  return sig;
}

Structure read_structure(const json& j) {
  object(j, {"name", "signature", "carriers", "sets", "constants", "functions"}, "structure");
  Structure st;
  st.name = str(j["name"], "structure name");
  st.signature = std::make_shared<Signature>(read_signature(j["signature"]));
  auto atom_map = [](const json& o, const char* what) {
    if (!o.is_object()) bad(std::string(what) + " must be an object");
    std::map<std::string, std::set<Atom>> out;
    for (const auto& [k, v] : o.items()) {
      auto atoms = strings(v, what);
      out[k] = std::set<Atom>(atoms.begin(), atoms.end());
    }
    return out;
  };
  st.carriers = atom_map(j["carriers"], "carriers");
  st.sets = atom_map(j["sets"], "sets");
  if (!j["constants"].is_object()) bad("constants must be an object");
  for (const auto& [k, v] : j["constants"].items()) st.constants[k] = str(v, "constant value");
  if (!j["functions"].is_object()) bad("functions must be an object");
  for (const auto& [k, v] : j["functions"].items()) {
    FunctionTable table;
    for (const auto& e : array(v, "function table")) {
      object(e, {"args", "result"}, "function entry");
      table[strings(e["args"], "args")] = str(e["result"], "result");
    }
    st.functions[k] = std::move(table);
  }
  for (const auto& d : validate_structure(st))
    if (d.severity == Severity::Error && (d.code == "unknown-symbol" || d.code == "sort" || d.code == "uninterpreted"))
      bad("structure '" + st.name + "': " + d.message);
  return st;
}

Term read_term(const json& j, const Signature& sig) {
  if (!j.is_object()) bad("term must be an object");
  try {
    if (j.contains("var")) {
      object(j, {"var", "sort"}, "variable term");
      std::string sort = str(j["sort"], "sort");
      if (!sig.has_sort(sort)) bad("undeclared sort '" + sort + "'");
      return Term::variable(str(j["var"], "var"), sort);
    }
    if (j.contains("const")) {
      object(j, {"const"}, "constant term");
      return Term::constant(sig, str(j["const"], "const"));
    }
    if (j.contains("elm")) {
      object(j, {"elm"}, "elm term");
      return Term::elm(sig, str(j["elm"], "elm"));
    }
    bool app = j.contains("app");
    object(j, {app ? "app" : "op", "args"}, "compound term");
    std::vector<Term> args;
    for (const auto& a : array(j["args"], "args")) args.push_back(read_term(a, sig));
    std::string name = str(j[app ? "app" : "op"], "operator");
    if (app) return Term::apply(sig, name, std::move(args));
    if (name == "&&") return Term::conjunction(std::move(args));
    if (args.size() != 2) bad("comparison needs two operands");
    if (name == "==") return Term::equal(args[0], args[1]);
    if (name == "!=") return Term::not_equal(args[0], args[1]);
    bad("unknown operator '" + name + "'");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Format) throw;
    bad(e.what());
  }
}

NetSchema read_schema(const json& j) {
  object(j, {"signature", "places", "transitions", "arcs"}, "schema");
  NetSchema s;
  s.signature = std::make_shared<Signature>(read_signature(j["signature"]));
  for (const auto& p : array(j["places"], "places")) {
    object(p, {"name", "sort", "init"}, "place");
    Place place{str(p["name"], "name"), str(p["sort"], "sort"), std::nullopt};
    if (!p["init"].is_null()) place.init = read_term(p["init"], *s.signature);
    s.places.push_back(std::move(place));
  }
  for (const auto& t : array(j["transitions"], "transitions")) {
    object(t, {"name", "guard"}, "transition");
    Transition tr{str(t["name"], "name"), std::nullopt};
    if (!t["guard"].is_null()) tr.guard = read_term(t["guard"], *s.signature);
    s.transitions.push_back(std::move(tr));
  }
  for (const auto& a : array(j["arcs"], "arcs")) {
    object(a, {"place", "transition", "direction", "inscription"}, "arc");
    auto p = s.find_place(str(a["place"], "place"));
    auto t = s.find_transition(str(a["transition"], "transition"));
    if (!p || !t) bad("arc refers to an unknown node");
    std::string dir = str(a["direction"], "direction");
    if (dir != "in" && dir != "out") bad("arc direction must be 'in' or 'out'");
    s.arcs.push_back(Arc{*p, *t, dir == "in" ? ArcDirection::PlaceToTransition : ArcDirection::TransitionToPlace,
                         read_term(a["inscription"], *s.signature)});
  }
  if (has_errors(validate_schema(s))) bad("schema is not well-formed");
  return s;
}

Marking read_marking(const json& j) {
  if (!j.is_object()) bad("marking must be an object");
  Marking m;
  for (const auto& [place, tokens] : j.items()) {
    Multiset& ms = m.tokens[place];
    for (const auto& t : strings(tokens, "tokens")) ++ms[t];
  }
  return m;
}

NetInstance read_instance(const json& j) {
  object(j, {"schema", "structure", "marking"}, "instance");
  NetInstance inst;
  inst.schema = read_schema(j["schema"]);
  auto st = std::make_shared<Structure>(read_structure(j["structure"]));
  if (!(*st->signature == *inst.schema.signature)) bad("structure and schema use different signatures");
  st->signature = inst.schema.signature;
  inst.structure = st;
  inst.marking = read_marking(j["marking"]);
  std::set<std::string> places;
  for (const auto& p : inst.schema.places) places.insert(p.name);
  for (const auto& [place, ms] : inst.marking.tokens) {
    if (!places.count(place)) bad("marking names unknown place '" + place + "'");
    const auto& sort = inst.schema.places[*inst.schema.find_place(place)].sort;
    for (const auto& [atom, n] : ms)
      if (!inst.structure->carrier(sort).count(atom)) bad("token '" + atom + "' is not of sort " + sort);
  }
  if (inst.marking.tokens.size() != places.size()) bad("marking must list every place");
  return inst;
}

Mode read_mode(const json& j) {
  object(j, {"transition", "valuation"}, "mode");
  Mode m{str(j["transition"], "transition"), {}};
  if (!j["valuation"].is_object()) bad("valuation must be an object");
  for (const auto& [k, v] : j["valuation"].items()) m.valuation[k] = str(v, "valuation entry");
  return m;
}

Run read_run(const json& j) {
  object(j, {"conditions", "events"}, "run");
  Run r;
  for (const auto& c : array(j["conditions"], "conditions")) {
    object(c, {"place", "token", "occurrence"}, "condition");
    r.conditions.push_back({str(c["place"], "place"), str(c["token"], "token"), index(c["occurrence"], "occurrence")});
  }
  for (const auto& e : array(j["events"], "events")) {
    object(e, {"mode", "preset", "postset"}, "event");
    Event ev{read_mode(e["mode"]), {}, {}};
    for (const auto& i : array(e["preset"], "preset")) ev.preset.push_back(index(i, "preset"));
    for (const auto& i : array(e["postset"], "postset")) ev.postset.push_back(index(i, "postset"));
    r.events.push_back(std::move(ev));
  }
  try {
    validate_run(r);
  } catch (const Error& e) {
    bad(e.what());
  }
  return r;
}

std::vector<InterfaceElement> read_side(const json& j) {
  std::vector<InterfaceElement> out;
  for (const auto& e : array(j, "interface")) {
    object(e, {"label", "kind", "sort", "node"}, "interface element");
    InterfaceElement ie;
    ie.label = str(e["label"], "label");
    std::string kind = str(e["kind"], "kind");
    if (kind != "place" && kind != "transition") bad("interface kind must be 'place' or 'transition'");
    ie.kind = kind == "place" ? ElementKind::Place : ElementKind::Transition;
    if (!e["sort"].is_null()) ie.sort = str(e["sort"], "sort");
    if (!e["node"].is_null()) ie.node = index(e["node"], "node");
    out.push_back(std::move(ie));
  }
  return out;
}

Module read_module(const json& j) {
  object(j, {"name", "left", "right", "interior"}, "module");
  Module m;
  m.name = str(j["name"], "name");
  m.left = read_side(j["left"]);
  m.right = read_side(j["right"]);
  const json& in = object(j["interior"], {"kind", "value"}, "interior");
  std::string kind = str(in["kind"], "interior kind");
  if (kind == "abstract") {
    if (!in["value"].is_null()) bad("abstract interior has no value");
    m.interior = Abstract{};
  } else if (kind == "schema") {
    m.interior = read_schema(in["value"]);
  } else if (kind == "instance") {
    m.interior = read_instance(in["value"]);
  } else if (kind == "run") {
    m.interior = read_run(in["value"]);
  } else {
    bad("unknown interior kind '" + kind + "'");
  }
  for (const auto& d : validate_module(m))
    if (d.severity == Severity::Error) bad("module '" + m.name + "': " + d.message);
  return m;
}

}  // namespace

std::string export_json(const Signature& sig) { return dump("signature", detail::signature_json(sig)); }
std::string export_json(const Structure& st) { return dump("structure", detail::structure_json(st)); }
std::string export_json(const NetSchema& schema) { return dump("schema", schema_json(schema)); }
std::string export_json(const NetInstance& inst) { return dump("instance", instance_json(inst)); }
std::string export_json(const Run& r) { return dump("run", run_json(r)); }
std::string export_json(const Module& m) { return dump("module", module_json(m)); }
std::string export_json(const ReachabilityGraph& g) { return dump("reachabilityGraph", graph_json(g)); }
std::string export_json(const Trace& t) { return dump("trace", trace_json(t)); }

template <>
Signature import_json<Signature>(std::string_view text) {
  return read_signature(body(text, "signature"));
}

template <>
Structure import_json<Structure>(std::string_view text) {
  return read_structure(body(text, "structure"));
}

template <>
NetSchema import_json<NetSchema>(std::string_view text) {
  return read_schema(body(text, "schema"));
}

template <>
NetInstance import_json<NetInstance>(std::string_view text) {
  return read_instance(body(text, "instance"));
}

template <>
Run import_json<Run>(std::string_view text) {
  return read_run(body(text, "run"));
}

template <>
Module import_json<Module>(std::string_view text) {
  return read_module(body(text, "module"));
}

template <>
ReachabilityGraph import_json<ReachabilityGraph>(std::string_view text) {
  const json& j = object(body(text, "reachabilityGraph"), {"nodes", "edges"}, "reachability graph");
  ReachabilityGraph g;
  for (const auto& n : array(j["nodes"], "nodes")) {
    object(n, {"id", "marking"}, "node");
    if (index(n["id"], "id") != g.markings.size()) bad("node ids must be consecutive from 0");
    g.markings.push_back(read_marking(n["marking"]));
  }
  for (const auto& e : array(j["edges"], "edges")) {
    object(e, {"from", "to", "transition", "valuation"}, "edge");
    ReachabilityGraph::Edge edge{index(e["from"], "from"), index(e["to"], "to"),
                                 read_mode(json{{"transition", e["transition"]}, {"valuation", e["valuation"]}})};
    if (edge.from >= g.markings.size() || edge.to >= g.markings.size()) bad("edge endpoint out of range");
    g.edges.push_back(std::move(edge));
  }
  return g;
}

template <>
Trace import_json<Trace>(std::string_view text) {
  Trace t;
  for (const auto& m : array(body(text, "trace"), "trace")) t.push_back(read_mode(m));
  return t;
}

}  // namespace hkl
