#include <doctest.h>

#include "fuzz.hpp"
#include "hkl/dsl.hpp"
#include "hkl/error.hpp"
#include "support.hpp"

using namespace hkl;
using namespace hkl::dsl;

namespace {

const std::vector<std::string> kCorpus = {
    "models/letters.hkl",        "tests/fixtures/empty.hkl",     "tests/fixtures/cycle.hkl",
    "tests/fixtures/idle.hkl",   "tests/fixtures/one_letter.hkl", "tests/fixtures/kind_mismatch.hkl",
    "tests/fixtures/mixed_order.hkl",
};

Diagnostics diags(const std::string& text) { return parse(text, "t.hkl").diagnostics; }

std::string with_sig(const std::string& body) {
  return "signature Sig { sorts T; set ts : T; const k : T; }\n" + body;
}

}  // namespace

TEST_CASE("the letters fixture parses cleanly") {
  auto r = parse(test::read_text("models/letters.hkl"), "letters.hkl");
  CHECK(r.diagnostics.empty());
  REQUIRE(r.model);
  CHECK(r.model->signatures.size() == 1);
  CHECK(r.model->structures.size() == 1);
  CHECK(r.model->modules.size() == 3);
  REQUIRE(r.model->systems.size() == 1);
  CHECK(r.model->systems[0].expr.module_names() == std::vector<std::string>{"sender", "postal_service", "receiver"});
  // left-associative: ((sender . postal_service) . receiver)
  CHECK(r.model->systems[0].expr.operands[1].module == "receiver");
}

TEST_CASE("empty input gives an empty model") {
  auto r = parse("", "empty.hkl");
  CHECK(r.diagnostics.empty());
  REQUIRE(r.model);
  CHECK(r.model->empty());
  CHECK(pretty_print(*r.model).empty());
}

TEST_CASE("undeclared sort is reported at its position") {
  auto r = parse(test::read_text("tests/fixtures/broken.hkl"), "broken.hkl");
  CHECK_FALSE(r.model);
  REQUIRE(r.diagnostics.size() == 1);
  const auto& d = r.diagnostics[0];
  CHECK(d.code == "unresolved-name");
  CHECK(d.location.file == "broken.hkl");
  CHECK(d.location.line == 3);
  CHECK(d.location.column == 17);
  CHECK(d.severity == Severity::Error);
}

TEST_CASE("round trip over the corpus") {
  for (const auto& f : kCorpus) {
    CAPTURE(f);
    auto first = parse(test::read_text(f), f);
    REQUIRE(first.model);
    std::string text = pretty_print(*first.model);
    auto second = parse(text, "printed.hkl");
    CHECK(second.diagnostics.empty());
    REQUIRE(second.model);
    CHECK(*second.model == *first.model);
    CHECK(pretty_print(*second.model) == text);
  }
}

TEST_CASE("printing uses canonical declaration order") {
  auto m = test::load("tests/fixtures/mixed_order.hkl");
  CHECK(pretty_print(m) == test::read_text("tests/fixtures/mixed_order.golden"));
}

TEST_CASE("lexer") {
  auto toks = tokenize("a \xE2\x80\xA2 b . \"x y\" -> 12 3x // comment\n \xE2\x82\xAC", "f");
  REQUIRE(toks.size() == 10);
  CHECK(toks[1].kind == TokenKind::Punct);
  CHECK(toks[1].text == ".");
  CHECK(toks[2].location.column == 5);  // the bullet counts as one column
  CHECK(toks[4].kind == TokenKind::String);
  CHECK(toks[4].text == "x y");
  CHECK(toks[6].kind == TokenKind::Number);
  CHECK(toks[7].kind == TokenKind::Invalid);
  CHECK(toks[8].kind == TokenKind::Invalid);
  CHECK(toks[8].location.line == 2);
  CHECK(toks[9].kind == TokenKind::End);
  CHECK(tokenize("\"open", "f")[0].kind == TokenKind::Invalid);
  CHECK(tokenize("\"\"", "f")[0].kind == TokenKind::Invalid);
}

TEST_CASE("bullet and dot are the same operator") {
  auto text = test::read_text("models/letters.hkl");
  auto dotted = text;
  for (std::size_t p; (p = dotted.find("\xE2\x80\xA2")) != std::string::npos;) dotted.replace(p, 3, ".");
  CHECK(*parse(dotted).model == *parse(text).model);
}

TEST_CASE("parenthesized systems") {
  auto m = test::letters();
  auto text = test::read_text("models/letters.hkl");
  text.replace(text.find("system"), std::string::npos,
               "system s = sender . (postal_service . receiver);\n");
  auto r = parse(text);
  REQUIRE(r.model);
  const auto& e = r.model->systems[0].expr;
  CHECK(e.operands[0].module == "sender");
  CHECK(e.operands[1].module_names() == std::vector<std::string>{"postal_service", "receiver"});
  CHECK(canonical_form(evaluate_system(*r.model, e)) == canonical_form(test::system_module(m)));
  auto printed = pretty_print(*r.model);
  CHECK(printed.find("sender . (postal_service . receiver)") != std::string::npos);
}

TEST_CASE("resolution diagnostics") {
  CHECK(count_code(diags(with_sig("signature Sig { sorts U; }")), "duplicate-declaration") == 1);
  CHECK(count_code(diags(with_sig("structure S : Nope { }")), "unresolved-name") == 1);
  CHECK(count_code(diags(with_sig("system s = missing;")), "unresolved-name") == 1);
  CHECK(count_code(diags(with_sig("module m : Sig { net { place p : T; arc p -> q : k; } }")), "unresolved-name") ==
        1);
  CHECK(count_code(diags(with_sig("module m : Sig { net { place p : T; place q : T; arc p -> q : k; } }")),
                   "arc-kind") == 1);
  CHECK(count_code(diags(with_sig("module m : Sig { net { transition t; place p : T; arc t -> p : elm(ts); } }")),
                   "elm-misplaced") == 1);
  CHECK(count_code(diags(with_sig("module m : Sig { left { transition t; } net { transition t; } }")),
                   "implicit-binding") == 1);
  CHECK(count_code(diags(with_sig("module m : Sig { left { transition t = p; } net { place p : T; } }")),
                   "binding") == 1);
  CHECK(count_code(diags(with_sig("module m { left { transition t = p; } }")), "abstract-binding") == 1);
  CHECK(count_code(diags(with_sig("module m { net { } }")), "missing-signature") == 1);
  CHECK(count_code(diags(with_sig("module m { left { transition t; transition t; } }")), "duplicate-label") == 1);
  CHECK(count_code(diags(with_sig("structure S : Sig { T = { a, a }; ts = {}; k = a; }")), "duplicate-atom") == 1);
  CHECK(count_code(diags(with_sig("structure S : Sig { T = { a }; ts = { b }; k = a; }")), "sort") == 1);
  CHECK(count_code(diags(with_sig("structure S : Sig { T = { a }; ts = {}; }")), "uninterpreted") == 1);
}

TEST_CASE("syntax errors recover and report several problems") {
  auto ds = diags("signature A { sorts ; }\nsignature B { sorts T }\nmodule m { left { place ; } }\n");
  CHECK(count_code(ds, "syntax") == 3);
  for (const auto& d : ds) CHECK(d.location.valid());
  auto unterminated = diags("signature A { sorts T;");
  CHECK(count_code(unterminated, "syntax") == 1);
  CHECK(count_code(diags("junk"), "syntax") == 1);
  CHECK(count_code(diags("signature S { sorts T; } $"), "invalid-token") == 1);
}

TEST_CASE("keywords and odd names can be quoted") {
  auto r = parse(with_sig("structure \"net\" : Sig { T = { \"place\", \"two words\" }; ts = {}; k = \"place\"; }"));
  REQUIRE(r.model);
  CHECK(r.model->structures[0]->name == "net");
  auto again = parse(pretty_print(*r.model));
  REQUIRE(again.model);
  CHECK(*again.model == *r.model);
}

TEST_CASE("printing rejects interiors without syntax") {
  ModelSet m;
  m.modules.push_back(Module{"r", {}, {}, Run{}});
  try {
    pretty_print(m);
    FAIL("expected Format");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
  }
}

TEST_CASE("every enumerated single-token corruption of letters.hkl is diagnosed") {
  const std::string text = test::read_text("models/letters.hkl");
  const auto toks = tokenize(text, "letters.hkl");
  std::size_t tried = 0, silent = 0;
  for (auto kind : {test::Corruption::DeletePunct, test::Corruption::NameToPunct, test::Corruption::SwapPunct,
                    test::Corruption::InsertStray}) {
    std::size_t choices = kind == test::Corruption::DeletePunct ? 1
                          : kind == test::Corruption::InsertStray ? test::strays().size()
                                                                  : test::puncts().size();
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!test::applicable(toks[i], kind)) continue;
      for (std::size_t c = 0; c < choices; ++c) {
        std::string mutated = test::apply(text, toks, {kind, i, c});
        ParseResult r;
        REQUIRE_NOTHROW(r = parse(mutated, "mutated.hkl"));
        ++tried;
        if (r.diagnostics.empty()) {
          ++silent;
          MESSAGE("undiagnosed corruption of token " << i << " '" << toks[i].text << "' kind "
                                                     << static_cast<int>(kind) << " choice " << c);
        }
      }
    }
  }
  CHECK(tried > 1000);
  CHECK(silent == 0);
}
