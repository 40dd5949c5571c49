#include <doctest.h>

#include <json.hpp>

#include "dot_checker.hpp"
#include "hkl/error.hpp"
#include "hkl/export.hpp"
#include "hkl/runs.hpp"
#include "support.hpp"

using namespace hkl;
using nlohmann::json;

namespace {

test::DotChecker checked(const std::string& dot) {
  test::DotChecker c(dot);
  REQUIRE_NOTHROW(c.check());
  return c;
}

ErrorCode import_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("import unexpectedly succeeded");
  return ErrorCode::Format;
}

}  // namespace

TEST_CASE("instance round trip") {
  auto inst = test::letters_instance();
  auto text = export_json(inst);
  auto j = json::parse(text);
  CHECK(j["formatVersion"] == 1);
  CHECK(j["kind"] == "instance");
  CHECK(import_json<NetInstance>(text) == inst);
  // fired instances keep their marking
  auto fired = fire(inst, Mode{"post", {{"x", "b"}}});
  CHECK(import_json<NetInstance>(export_json(fired)) == fired);
}

TEST_CASE("empty places export as empty arrays") {
  auto inst = test::letters_instance();
  auto j = json::parse(export_json(inst));
  const auto& marking = j["body"]["marking"];
  REQUIRE(marking.contains("inbox"));
  CHECK(marking["inbox"].is_array());
  CHECK(marking["inbox"].empty());
  CHECK(marking["outbox"] == json::array({"a", "b", "c"}));
}

TEST_CASE("module, schema, signature and structure round trips") {
  auto model = test::letters();
  for (const auto& m : model.modules) CHECK(import_json<Module>(export_json(m)) == m);
  Module sys = test::system_module(model);
  CHECK(import_json<Module>(export_json(sys)) == sys);
  const auto& schema = std::get<NetSchema>(sys.interior);
  CHECK(import_json<NetSchema>(export_json(schema)) == schema);
  CHECK(import_json<Signature>(export_json(*model.signatures[0])) == *model.signatures[0]);
  CHECK(import_json<Structure>(export_json(*model.structures[0])) == *model.structures[0]);
  Module abs{"abs", {{"t", ElementKind::Transition, {}, {}}}, {}, Abstract{}};
  CHECK(import_json<Module>(export_json(abs)) == abs);
  Module withInstance{"i", {}, {}, test::letters_instance()};
  CHECK(import_json<Module>(export_json(withInstance)) == withInstance);
}

TEST_CASE("guards survive the round trip") {
  auto m = test::load("tests/fixtures/mixed_order.hkl");
  const Module& a = *m.find_module("a");
  CHECK(import_json<Module>(export_json(a)) == a);
}

TEST_CASE("run and trace round trips") {
  auto runs = unfold(test::letters_instance(), 100);
  CHECK(import_json<Run>(export_json(runs[0])) == runs[0]);
  Trace t = {Mode{"post", {{"x", "a"}}}, Mode{"forward", {{"x", "a"}}}};
  CHECK(import_json<Trace>(export_json(t)) == t);
  CHECK(import_json<Trace>(export_json(Trace{})).empty());
}

TEST_CASE("reachability graph export") {
  auto g = reachable_markings(test::letters_instance(), 1000);
  auto j = json::parse(export_json(g));
  CHECK(j["body"]["nodes"].size() == 64);
  CHECK(j["body"]["edges"].size() == g.edges.size());
  const auto& e = j["body"]["edges"][0];
  CHECK(e.contains("transition"));
  CHECK(e["valuation"].contains("x"));
  CHECK(import_json<ReachabilityGraph>(export_json(g)) == g);
}

TEST_CASE("import is strict") {
  auto inst = test::letters_instance();
  auto j = json::parse(export_json(inst));
  SUBCASE("unknown key") {
    j["body"]["extra"] = 1;
    CHECK(import_error([&] { import_json<NetInstance>(j.dump()); }) == ErrorCode::Format);
  }
  SUBCASE("missing key") {
    j["body"].erase("marking");
    CHECK(import_error([&] { import_json<NetInstance>(j.dump()); }) == ErrorCode::Format);
  }
  SUBCASE("wrong version") {
    j["formatVersion"] = 2;
    CHECK(import_error([&] { import_json<NetInstance>(j.dump()); }) == ErrorCode::Format);
  }
  SUBCASE("wrong kind") {
    CHECK(import_error([&] { import_json<Run>(j.dump()); }) == ErrorCode::Format);
  }
  SUBCASE("ill-sorted token") {
    j["body"]["marking"]["inbox"] = json::array({"m"});
    CHECK(import_error([&] { import_json<NetInstance>(j.dump()); }) == ErrorCode::Format);
  }
  SUBCASE("ill-sorted inscription") {
    j["body"]["schema"]["arcs"][0]["inscription"] = json{{"var", "x"}, {"sort", "Nope"}};
    CHECK(import_error([&] { import_json<NetInstance>(j.dump()); }) == ErrorCode::Format);
  }
  SUBCASE("malformed text") {
    CHECK(import_error([&] { import_json<NetInstance>("{"); }) == ErrorCode::Format);
  }
  SUBCASE("cyclic run") {
    json run = json::parse(export_json(Run{{{"p", "t", 0}}, {}}));
    run["body"]["events"] = json::array({json{{"mode", json{{"transition", "e"}, {"valuation", json::object()}}},
                                              {"preset", {0}},
                                              {"postset", {0}}}});
    CHECK(import_error([&] { import_json<Run>(run.dump()); }) == ErrorCode::Format);
  }
}

TEST_CASE("DOT for the S0 run") {
  auto runs = unfold(test::letters_instance(), 100);
  auto c = checked(export_dot(runs[0]));
  CHECK(c.nodes_with_shape("box") == 9);
  CHECK(c.nodes_with_shape("ellipse") == 12);
  CHECK(c.edges() == 18);
  auto dot = export_dot(runs[0]);
  CHECK(dot.find("\"outbox:a\"") != std::string::npos);
}

TEST_CASE("DOT for degenerate and closed subjects") {
  auto empty = checked(export_dot(Run{}));
  CHECK(empty.node_statements() == 0);
  CHECK(empty.edges() == 0);

  Module sys = test::system_module(test::letters());
  auto closed = checked(export_dot(sys));
  CHECK(closed.subgraphs() == 0);
  CHECK(closed.nodes_with_shape("ellipse") == 4);
  CHECK(closed.nodes_with_shape("box") == 3);

  Module ps = *test::letters().find_module("postal_service");
  auto open = checked(export_dot(ps));
  CHECK(open.subgraphs() == 2);
  CHECK(export_dot(ps).find("rank=min") != std::string::npos);
}

TEST_CASE("DOT for instances and reachability graphs") {
  auto inst = test::letters_instance();
  auto c = checked(export_dot(inst));
  CHECK(c.nodes_with_shape("ellipse") == 4);
  auto g = reachable_markings(inst, 1000);
  auto gc = checked(export_dot(g));
  CHECK(gc.node_statements() == 64);
  CHECK(gc.edges() == g.edges.size());
  // quoting survives odd names
  auto m = test::load("tests/fixtures/mixed_order.hkl");
  checked(export_dot(*m.find_module("a")));
  checked(export_dot(test::system_module(m)));
}

TEST_CASE("DOT output is deterministic") {
  auto inst = test::letters_instance();
  CHECK(export_dot(inst) == export_dot(test::letters_instance()));
}
