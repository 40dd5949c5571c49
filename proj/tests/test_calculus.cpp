#include <doctest.h>

#include "hkl/calculus.hpp"
#include "hkl/error.hpp"
#include "hkl/runs.hpp"
#include "support.hpp"

using namespace hkl;

namespace {

const Module& named(const dsl::ModelSet& m, const char* name) { return *m.find_module(name); }

ErrorCode code_of(const Module& a, const Module& b) {
  try {
    compose(a, b);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("composition unexpectedly succeeded");
  return ErrorCode::Format;
}

InterfaceElement transition(const std::string& label) { return {label, ElementKind::Transition, {}, {}}; }
InterfaceElement place(const std::string& label, const std::string& sort = "S") {
  return {label, ElementKind::Place, sort, {}};
}

Module abstract(const std::string& name, std::vector<InterfaceElement> left, std::vector<InterfaceElement> right) {
  return make_module(Module{name, std::move(left), std::move(right), Abstract{}});
}

/// Permutes places and transitions and renames every node.
NetSchema shuffle(const NetSchema& s, std::uint64_t seed, std::vector<std::size_t>& pmap,
                  std::vector<std::size_t>& tmap) {
  std::mt19937_64 rng(seed);
  pmap.resize(s.places.size());
  tmap.resize(s.transitions.size());
  for (std::size_t i = 0; i < pmap.size(); ++i) pmap[i] = i;
  for (std::size_t i = 0; i < tmap.size(); ++i) tmap[i] = i;
  std::shuffle(pmap.begin(), pmap.end(), rng);
  std::shuffle(tmap.begin(), tmap.end(), rng);
  NetSchema out;
  out.signature = s.signature;
  out.places.resize(s.places.size());
  out.transitions.resize(s.transitions.size());
  for (std::size_t i = 0; i < pmap.size(); ++i) {
    out.places[pmap[i]] = s.places[i];
    out.places[pmap[i]].name = "q" + std::to_string(pmap[i]) + "_" + s.places[i].name;
  }
  for (std::size_t i = 0; i < tmap.size(); ++i) {
    out.transitions[tmap[i]] = s.transitions[i];
    out.transitions[tmap[i]].name = "u" + std::to_string(tmap[i]);
  }
  for (auto a : s.arcs) {
    a.place = pmap[a.place];
    a.transition = tmap[a.transition];
    out.arcs.push_back(a);
  }
  std::shuffle(out.arcs.begin(), out.arcs.end(), rng);
  return out;
}

}  // namespace

TEST_CASE("sender . postal_service . receiver is a closed module") {
  auto model = test::letters();
  Module sys = test::system_module(model);
  CHECK(sys.left.empty());
  CHECK(sys.right.empty());
  const auto& s = std::get<NetSchema>(sys.interior);
  CHECK(s.places.size() == 4);
  CHECK(s.transitions.size() == 3);
  CHECK(s.arcs.size() == 6);
  CHECK(s.find_transition("post"));
  CHECK(s.find_transition("deliver"));
  CHECK(sys.name == "sender.postal_service.receiver");
}

TEST_CASE("unmatched interface elements propagate") {
  auto model = test::letters();
  Module sp = compose(named(model, "sender"), named(model, "postal_service"));
  CHECK(sp.left.empty());
  CHECK(labels(sp.right) == std::vector<std::string>{"deliver"});
  Module pr = compose(named(model, "postal_service"), named(model, "receiver"));
  CHECK(labels(pr.left) == std::vector<std::string>{"post"});
  CHECK(pr.right.empty());
  // composing in the wrong order matches nothing
  Module rs = compose(named(model, "receiver"), named(model, "sender"));
  CHECK(labels(rs.left) == std::vector<std::string>{"deliver"});
  CHECK(labels(rs.right) == std::vector<std::string>{"post"});
}

TEST_CASE("composition errors") {
  SUBCASE("kind mismatch") {
    auto a = abstract("a", {}, {transition("post")});
    auto b = abstract("b", {place("post")}, {});
    CHECK(code_of(a, b) == ErrorCode::KindMismatch);
    auto c = is_composable(a, b);
    CHECK_FALSE(c.ok);
    REQUIRE(c.blocking.size() == 1);
    CHECK(c.blocking[0].subject == "post");
  }
  SUBCASE("sort mismatch") {
    auto a = abstract("a", {}, {place("p", "S")});
    auto b = abstract("b", {place("p", "T")}, {});
    CHECK(code_of(a, b) == ErrorCode::SortMismatch);
  }
  SUBCASE("duplicate label after propagation") {
    auto a = abstract("a", {}, {transition("x")});
    auto b = abstract("b", {}, {transition("x")});
    CHECK(code_of(a, b) == ErrorCode::DuplicateLabel);
    CHECK_FALSE(is_composable(a, b).ok);
  }
  SUBCASE("mixed interiors") {
    auto model = test::letters();
    Run r;
    Module run{"r", {}, {}, r};
    CHECK(code_of(named(model, "sender"), run) == ErrorCode::KindMismatch);
  }
  SUBCASE("different signatures") {
    auto model = test::letters();
    Module other = named(model, "receiver");
    auto& s = std::get<NetSchema>(other.interior);
    auto sig = std::make_shared<Signature>(*s.signature);
    sig->name = "Elsewhere";
    s.signature = sig;
    for (auto& a : s.arcs) a.inscription = Term::variable("x", "Letter");
    Module pr = named(model, "postal_service");
    CHECK(code_of(pr, other) == ErrorCode::SignatureMismatch);
  }
  SUBCASE("fused places need equal initial inscriptions") {
    auto sig = test::random_signature();
    NetSchema s1{sig, {{"p", "S", Term::elm(*sig, "all")}}, {}, {}};
    NetSchema s2{sig, {{"p", "S", std::nullopt}}, {}, {}};
    Module a = make_module({"a", {}, {{"p", ElementKind::Place, "S", 0}}, s1});
    Module b = make_module({"b", {{"p", ElementKind::Place, "S", 0}}, {}, s2});
    CHECK(code_of(a, b) == ErrorCode::InscriptionMismatch);
  }
}

TEST_CASE("module construction is validated") {
  CHECK_THROWS_AS(abstract("a", {transition("x"), transition("x")}, {}), Error);
  auto sig = test::random_signature();
  NetSchema s{sig, {{"p", "S", std::nullopt}}, {}, {}};
  CHECK_THROWS_AS(make_module({"m", {{"t", ElementKind::Transition, {}, 0}}, {}, s}), Error);
  CHECK_THROWS_AS(make_module({"m", {{"p", ElementKind::Place, "S", 3}}, {}, s}), Error);
  CHECK_THROWS_AS(make_module({"m", {{"p", ElementKind::Place, "S", 0}}, {}, Abstract{}}), Error);
}

TEST_CASE("abstract modules compose as interface skeletons") {
  auto r = abstract("R", {}, {transition("post")});
  auto s = abstract("S", {transition("post")}, {transition("deliver")});
  auto t = abstract("T", {transition("deliver")}, {});
  Module rst = compose(compose(r, s), t);
  CHECK(rst.left.empty());
  CHECK(rst.right.empty());
  CHECK(std::holds_alternative<Abstract>(rst.interior));
}

TEST_CASE("canonical form ignores node order and names") {
  auto model = test::letters();
  Module sys = test::system_module(model);
  const auto& s = std::get<NetSchema>(sys.interior);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::size_t> pmap, tmap;
    Module copy = sys;
    copy.name = "renamed";
    copy.interior = shuffle(s, seed, pmap, tmap);
    CHECK(canonical_form(copy) == canonical_form(sys));
  }
  // a different net is told apart
  Module other = sys;
  std::get<NetSchema>(other.interior).arcs.pop_back();
  CHECK_FALSE(canonical_form(other) == canonical_form(sys));
}

TEST_CASE("canonical form keeps interface bindings") {
  auto model = test::letters();
  Module ps = named(model, "postal_service");
  const auto& s = std::get<NetSchema>(ps.interior);
  std::vector<std::size_t> pmap, tmap;
  Module copy = ps;
  copy.interior = shuffle(s, 7, pmap, tmap);
  for (auto* side : {&copy.left, &copy.right})
    for (auto& e : *side) e.node = tmap[*e.node];
  CHECK(canonical_form(copy) == canonical_form(ps));
  // swapping which transition the left interface binds changes the module
  Module swapped = ps;
  swapped.left[0].node = *s.find_transition("forward");
  CHECK_FALSE(canonical_form(swapped) == canonical_form(ps));
}

TEST_CASE("label renaming") {
  auto model = test::letters();
  Module ps = rename_labels(named(model, "postal_service"), {{"post", "drop"}});
  CHECK(labels(ps.left) == std::vector<std::string>{"drop"});
  auto two = abstract("m", {transition("a"), transition("b")}, {});
  CHECK_THROWS_AS(rename_labels(two, {{"a", "b"}}), Error);
  CHECK(rename_labels(two, {{"a", "b"}, {"b", "a"}}).left.size() == 2);
}

TEST_CASE("composition is associative on random triples") {
  test::ModuleGenerator gen(20240601);
  std::size_t attempts = 0;
  for (int i = 0; i < 300; ++i) {
    auto [r, s, t] = gen.composable_triple(&attempts);
    CAPTURE(i);
    CHECK(canonical_form(compose(compose(r, s), t)) == canonical_form(compose(r, compose(s, t))));
  }
  CHECK(attempts >= 300);
}

TEST_CASE("identity-like behaviour of empty abstract modules") {
  auto model = test::letters();
  Module e = abstract("e", {}, {});
  Module sender = named(model, "sender");
  CHECK(canonical_form(compose(sender, e)) == canonical_form(sender));
  CHECK(canonical_form(compose(e, sender)) == canonical_form(sender));
}

TEST_CASE("interior sizes") {
  auto model = test::letters();
  CHECK(interior_size(named(model, "postal_service").interior) == 5);
  CHECK(interior_size(Abstract{}) == 0);
}
