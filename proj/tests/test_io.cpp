#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "refinet/equilibrium.hpp"
#include "refinet/io.hpp"
#include "refinet/lp_reference.hpp"
#include "refinet/maximin.hpp"

using namespace refinet;
using fixtures::q;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const io::InputError& e) {
    return e.what();
  }
  return "";
}

const char* kInstance = R"({
  "side0": {"atoms": [{"id": "x1", "weight": "1"}, {"id": "x2", "weight": 0.5}]},
  "side1": {"atoms": [{"id": "y1", "weight": "3/2"}]},
  "edges": [["x1", "y1"], ["x2", "y1"]]
})";

}  // namespace

TEST_CASE("instance parsing accepts rationals, decimals and numbers") {
  auto inst = io::parse_instance(io::load_text("inst", kInstance));
  CHECK(inst->side(0).weight(1) == q(1, 2));
  CHECK(inst->side(1).weight(0) == q(3, 2));
  CHECK(inst->edges().size() == 2);
  CHECK(io::rational_json(q(-6, 4)) == "-3/2");
}

TEST_CASE("round trips") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = fixtures::random_instance(seed);
    std::string text = io::instance_to_json(*inst).dump();
    auto back = io::parse_instance(io::load_text("rt", text));
    CHECK(back->side(0) == inst->side(0));
    CHECK(back->side(1) == inst->side(1));
    CHECK(back->edges() == inst->edges());
    CHECK(io::instance_to_json(*back).dump() == text);

    for (int side = 0; side < 2; ++side) {
      Plan p = random_feasible_plan(inst, side, seed);
      std::string ptext = io::plan_to_json(p).dump();
      Plan pb = io::parse_plan(io::load_text("plan", ptext), inst);
      CHECK(pb == p);
      CHECK(io::plan_to_json(pb).dump() == ptext);
    }
  }
}

TEST_CASE("equilibrium round trip") {
  auto i1 = fixtures::i1();
  Equilibrium eq = build_equilibrium(fixtures::pi_identity(i1), fixtures::pi_cross(i1));
  std::string text = io::equilibrium_to_json(eq).dump();
  Equilibrium back = io::parse_equilibrium(io::load_text("eq", text), i1);
  CHECK(back.price.value == eq.price.value);
  for (int s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back.allocation.bundle[s][i].part0 == eq.allocation.bundle[s][i].part0);
      CHECK(back.allocation.bundle[s][i].part1 == eq.allocation.bundle[s][i].part1);
    }
  CHECK(verify_walras(back.allocation, back.price).ok());
}

TEST_CASE("malformed input is located") {
  std::string syntax = error_of([] { io::load_text("bad.json", "{\n  \"side0\": [1,\n}"); });
  CHECK(syntax.find("bad.json:3:") == 0);

  const char* missing = "{\n  \"side0\": {\"atoms\": [{\"id\": \"x\", \"weight\": 0}]},\n  \"edges\": []\n}";
  CHECK(error_of([&] { io::parse_instance(io::load_text("m.json", missing)); }).find("missing \"side1\"") != std::string::npos);

  const char* weight = R"({
  "side0": {"atoms": [{"id": "x1", "weight": "1"}]},
  "side1": {"atoms": [
    {"id": "y1", "weight": "one"}
  ]},
  "edges": [["x1", "y1"]]
})";
  std::string w = error_of([&] { io::parse_instance(io::load_text("w.json", weight)); });
  CHECK(w.find("/side1/atoms/0/weight") != std::string::npos);
  CHECK(w.find("(line 4)") != std::string::npos);

  const char* edge = R"({
  "side0": {"atoms": [{"id": "x1", "weight": "1"}]},
  "side1": {"atoms": [{"id": "y1", "weight": "1"}]},
  "edges": [["x1", "y9"]]
})";
  CHECK(error_of([&] { io::parse_instance(io::load_text("e.json", edge)); }).find("y9") != std::string::npos);

  auto inst = io::parse_instance(io::load_text("inst", kInstance));
  const char* negative = R"({"source_side": 0, "entries": [
    {"from": "x1", "to": "y1", "mass": "-1"}
  ]})";
  std::string n = error_of([&] { io::parse_plan(io::load_text("n.json", negative), inst); });
  CHECK(n.find("/entries/0/mass") != std::string::npos);
  CHECK(n.find("(line 2)") != std::string::npos);

  const char* side = R"({"source_side": 2, "entries": []})";
  CHECK(error_of([&] { io::parse_plan(io::load_text("s.json", side), inst); }).find("side must be 0 or 1") != std::string::npos);

  CHECK_FALSE(error_of([] { io::load_file("/nonexistent/file.json"); }).empty());
}

TEST_CASE("line locator") {
  std::string text = "{\n  \"a\": [\n    1,\n    {\"b\": 2}\n  ]\n}";
  CHECK(io::locate_line(text, "/a") == 2);
  CHECK(io::locate_line(text, "/a/0") == 3);
  CHECK(io::locate_line(text, "/a/1/b") == 4);
  CHECK(io::locate_line(text, "/zzz") == 0);
}
