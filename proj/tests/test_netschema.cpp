#include <doctest.h>

#include "hkl/error.hpp"
#include "hkl/netschema.hpp"
#include "support.hpp"

using namespace hkl;

namespace {

/// One-place, one-transition net over the letter signature.
NetSchema tiny(const SignaturePtr& sig, std::optional<Term> guard, Term out) {
  NetSchema s;
  s.signature = sig;
  s.places = {{"in", "Letter", Term::elm(*sig, "letters")}, {"out", out.sort(), std::nullopt}};
  s.transitions = {{"t", std::move(guard)}};
  s.arcs = {{0, 0, ArcDirection::PlaceToTransition, Term::variable("x", "Letter")},
            {1, 0, ArcDirection::TransitionToPlace, std::move(out)}};
  return s;
}

}  // namespace

TEST_CASE("the composed letter net instantiates with three tokens in the outbox") {
  auto inst = test::letters_instance();
  CHECK(inst.schema.places.size() == 4);
  CHECK(inst.schema.transitions.size() == 3);
  CHECK(inst.marking.tokens.at("outbox") == Multiset{{"a", 1}, {"b", 1}, {"c", 1}});
  CHECK(inst.marking.tokens.at("inbox").empty());
  CHECK(inst.marking.total() == 3);
}

TEST_CASE("initially only post is enabled, once per letter") {
  auto inst = test::letters_instance();
  auto modes = enabled_modes(inst);
  REQUIRE(modes.size() == 3);
  for (const auto& m : modes) CHECK(m.transition == "post");
  CHECK(modes[0].valuation.at("x") == "a");
  CHECK_THROWS_AS(fire(inst, Mode{"forward", {{"x", "a"}}}), Error);
}

TEST_CASE("post, forward and deliver move a letter to the inbox") {
  auto inst = test::letters_instance();
  for (const char* t : {"post", "forward", "deliver"}) inst = fire(inst, Mode{t, {{"x", "a"}}});
  CHECK(inst.marking.tokens.at("inbox") == Multiset{{"a", 1}});
  CHECK(inst.marking.tokens.at("outbox") == Multiset{{"b", 1}, {"c", 1}});
}

TEST_CASE("reachable markings match the hand-written state space") {
  auto inst = test::letters_instance();
  auto g = reachable_markings(inst, 1000);
  CHECK(g.markings.size() == 64);
  std::set<Marking> engine(g.markings.begin(), g.markings.end());
  CHECK(engine == test::letter_markings_oracle({"a", "b", "c"}));
  CHECK(g.markings.front() == inst.marking);
  // each undelivered letter contributes one edge: 3 letters * 48 markings
  CHECK(g.edges.size() == 144);
  CHECK_THROWS_AS(reachable_markings(inst, 63), Error);
  CHECK_THROWS_AS(reachable_markings(inst, 0), Error);
}

TEST_CASE("undefined inscriptions disable a mode") {
  auto model = test::letters();
  auto sig = model.signatures.front();
  Term gfx = Term::apply(*sig, "g", {Term::apply(*sig, "f", {Term::variable("x", "Letter")})});
  auto inst = instantiate(tiny(sig, std::nullopt, gfx), model.structures.front());
  auto modes = enabled_modes(inst);
  REQUIRE(modes.size() == 2);  // g(f(c)) is undefined
  CHECK(modes[0].valuation.at("x") == "a");
  CHECK(modes[1].valuation.at("x") == "b");
  auto next = fire(inst, modes[0]);
  CHECK(next.marking.tokens.at("out") == Multiset{{"1", 1}});
  CHECK(all_modes(inst).size() == 2);
}

TEST_CASE("guards restrict modes") {
  auto model = test::letters();
  auto sig = model.signatures.front();
  Term x = Term::variable("x", "Letter");
  Term guard = Term::equal(Term::apply(*sig, "f", {x}), Term::apply(*sig, "f", {x}));
  auto inst = instantiate(tiny(sig, Term::not_equal(Term::apply(*sig, "f", {x}), Term::apply(*sig, "f", {x})), x),
                          model.structures.front());
  CHECK(enabled_modes(inst).empty());
  inst = instantiate(tiny(sig, guard, x), model.structures.front());
  CHECK(enabled_modes(inst).size() == 3);
}

TEST_CASE("schema validation") {
  auto sig = test::letters().signatures.front();
  Term x = Term::variable("x", "Letter");
  SUBCASE("arc sort") {
    auto s = tiny(sig, std::nullopt, x);
    s.places[1].sort = "Stamp";
    CHECK(count_code(validate_schema(s), "arc-sort") == 1);
  }
  SUBCASE("elm outside an initial marking") {
    auto s = tiny(sig, std::nullopt, Term::elm(*sig, "letters"));
    s.places[1].sort = "Letter";
    CHECK(count_code(validate_schema(s), "elm-misplaced") == 1);
  }
  SUBCASE("guard over an unbound variable") {
    auto s = tiny(sig, Term::equal(x, Term::variable("w", "Letter")), x);
    CHECK(count_code(validate_schema(s), "guard-unbound") == 1);
  }
  SUBCASE("output-only variable is fine for fragments but not for execution") {
    auto s = tiny(sig, std::nullopt, Term::variable("w", "Letter"));
    CHECK_FALSE(has_errors(validate_schema(s)));
    CHECK(count_code(validate_schema(s, true), "free-output-variable") == 1);
    CHECK_THROWS_AS(instantiate(s, test::letters().structures.front()), Error);
  }
  SUBCASE("duplicate node names") {
    auto s = tiny(sig, std::nullopt, x);
    s.transitions.push_back({"in", std::nullopt});
    CHECK(count_code(validate_schema(s), "duplicate-name") == 1);
  }
}

TEST_CASE("instantiation checks signature and structure") {
  auto model = test::letters();
  auto inst_schema = std::get<NetSchema>(test::system_module(model).interior);
  auto other = std::make_shared<Signature>(*model.signatures.front());
  other->name = "Other";
  auto st = std::make_shared<Structure>(*model.structures.front());
  st->signature = other;
  try {
    instantiate(inst_schema, st);
    FAIL("expected SignatureMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SignatureMismatch);
  }
  auto broken = std::make_shared<Structure>(*model.structures.front());
  broken->functions["f"][{"b"}] = "m";
  try {
    instantiate(inst_schema, broken);
    FAIL("expected InvalidStructure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidStructure);
  }
}

TEST_CASE("mode effects and the mode cap") {
  auto inst = test::letters_instance();
  auto eff = mode_effect(inst, Mode{"forward", {{"x", "b"}}});
  REQUIRE(eff);
  CHECK(eff->consumed.at("postbox") == Multiset{{"b", 1}});
  CHECK(eff->produced.at("deliveryBox") == Multiset{{"b", 1}});
  CHECK(all_modes(inst).size() == 9);
  CHECK_THROWS_AS(all_modes(inst, 8), Error);
}
