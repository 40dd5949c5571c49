#include <doctest.h>

#include "hkl/error.hpp"
#include "hkl/signatures.hpp"
#include "support.hpp"

using namespace hkl;

namespace {

Structure s0() { return *test::letters().structures.front(); }

Diagnostics errors_of(const Structure& st) {
  Diagnostics out;
  for (const auto& d : validate_structure(st))
    if (d.severity == Severity::Error) out.push_back(d);
  return out;
}

}  // namespace

TEST_CASE("the letter signature declares three sets and two injective functions") {
  auto sig = test::letters().signatures.front();
  CHECK(sig->sorts.size() == 3);
  CHECK(sig->sets.size() == 3);
  CHECK(sig->functions.size() == 2);
  CHECK(sig->is_injective("f"));
  CHECK(sig->is_injective("g"));
  CHECK_FALSE(sig->is_partial("f"));
  CHECK(sig->is_partial("g"));
  CHECK(validate_signature(*sig).empty());
}

TEST_CASE("signature validation") {
  Signature sig;
  sig.name = "X";
  sig.sorts = {"A", "A"};
  sig.sets = {{"s", "B"}};
  sig.functions = {{"h", {"A"}, "A"}};
  sig.requirements = {{RequirementKind::Partial, "h"}, {RequirementKind::Total, "h"},
                      {RequirementKind::Injective, "nothing"}};
  auto ds = validate_signature(sig);
  CHECK(count_code(ds, "duplicate-name") == 1);
  CHECK(count_code(ds, "undeclared-sort") == 1);
  CHECK(count_code(ds, "conflicting-requirement") == 1);
  CHECK(count_code(ds, "unknown-requirement-subject") == 1);
}

TEST_CASE("S0 satisfies every requirement") { CHECK(errors_of(s0()).empty()); }

TEST_CASE("structure mutations are reported once with the right kind") {
  SUBCASE("injectivity") {
    Structure st = s0();
    st.functions["f"][{"b"}] = "m";
    auto ds = errors_of(st);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "injectivity");
    CHECK(ds[0].subject == "f");
  }
  SUBCASE("totality") {
    Structure st = s0();
    st.functions["f"].erase({"c"});
    auto ds = errors_of(st);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "totality");
  }
  SUBCASE("sort") {
    Structure st = s0();
    st.functions["f"][{"a"}] = "1";
    auto ds = errors_of(st);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "sort");
  }
  SUBCASE("partial functions may be undefined") {
    Structure st = s0();
    st.functions["g"].erase({"l"});
    CHECK(errors_of(st).empty());
  }
  SUBCASE("uninterpreted symbols") {
    Structure st = s0();
    st.sets.erase("codes");
    auto ds = errors_of(st);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].code == "uninterpreted");
  }
}

TEST_CASE("term construction is sort-checked") {
  auto sig = test::letters().signatures.front();
  Term x = Term::variable("x", "Letter");
  Term fx = Term::apply(*sig, "f", {x});
  CHECK(fx.sort() == "Stamp");
  CHECK(Term::apply(*sig, "g", {fx}).sort() == "Code");
  CHECK_THROWS_AS(Term::apply(*sig, "g", {x}), Error);
  CHECK_THROWS_AS(Term::apply(*sig, "nope", {x}), Error);
  CHECK_THROWS_AS(Term::elm(*sig, "Letter"), Error);
  CHECK_THROWS_AS(Term::equal(x, fx), Error);
  CHECK(fx.to_string() == "f(x)");
  CHECK(fx.variables() == std::map<std::string, std::string>{{"x", "Letter"}});

  try {
    Term::apply(*sig, "g", {x});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SortMismatch);
  }
}

TEST_CASE("evaluation follows the function tables") {
  auto model = test::letters();
  const auto& st = *model.structures.front();
  const auto& sig = *model.signatures.front();
  Term gfx = Term::apply(sig, "g", {Term::apply(sig, "f", {Term::variable("x", "Letter")})});
  // a -> m -> 1, b -> n -> 2, c -> o -> undefined
  CHECK(eval_term(gfx, st, {{"x", "a"}}) == std::optional<Atom>("1"));
  CHECK(eval_term(gfx, st, {{"x", "b"}}) == std::optional<Atom>("2"));
  CHECK_FALSE(eval_term(gfx, st, {{"x", "c"}}).has_value());
  CHECK_THROWS_AS(eval_term(gfx, st, {}), Error);
  CHECK_THROWS_AS(eval_term(gfx, st, {{"x", "zz"}}), Error);
  CHECK_THROWS_AS(eval_term(Term::elm(sig, "letters"), st, {}), Error);
  CHECK(expand_elm("letters", st) == std::set<Atom>{"a", "b", "c"});
}

TEST_CASE("guards combine comparisons") {
  auto model = test::letters();
  const auto& st = *model.structures.front();
  const auto& sig = *model.signatures.front();
  Term x = Term::variable("x", "Letter");
  Term gfx = Term::apply(sig, "g", {Term::apply(sig, "f", {x})});
  Term y = Term::variable("y", "Code");
  Term guard = Term::conjunction({Term::equal(gfx, y), Term::not_equal(x, Term::variable("z", "Letter"))});
  CHECK(eval_guard(guard, st, {{"x", "a"}, {"y", "1"}, {"z", "b"}}) == std::optional<bool>(true));
  CHECK(eval_guard(guard, st, {{"x", "a"}, {"y", "2"}, {"z", "b"}}) == std::optional<bool>(false));
  CHECK_FALSE(eval_guard(guard, st, {{"x", "c"}, {"y", "1"}, {"z", "b"}}).has_value());
  // flattening and deduplication make conjunction order irrelevant
  Term a = Term::equal(x, x), b = Term::not_equal(y, y);
  CHECK(Term::conjunction({a, b}) == Term::conjunction({b, Term::conjunction({a, a})}));
}
