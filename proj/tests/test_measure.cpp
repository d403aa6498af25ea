#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "refinet/lp_reference.hpp"
#include "refinet/maximin.hpp"
#include "refinet/measure.hpp"

using namespace refinet;
using fixtures::q;

namespace {

SpacePtr space(std::vector<Rational> weights) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < weights.size(); ++i) atoms.push_back({"a" + std::to_string(i), weights[i]});
  return std::make_shared<const AtomSpace>(atoms);
}

Measure measure(const SpacePtr& s, std::vector<Rational> mass) { return Measure(s, std::move(mass)); }

}  // namespace

TEST_CASE("parse_rational accepts fractions, integers and decimals") {
  CHECK(parse_rational("3/4") == q(3, 4));
  CHECK(parse_rational("6/8") == q(3, 4));
  CHECK(parse_rational("-2") == -2);
  CHECK(parse_rational("0.25") == q(1, 4));
  CHECK(parse_rational("3e-2") == q(3, 100));
  CHECK(parse_rational("1.5E1") == 15);
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
  CHECK(to_string(q(6, 8)) == "3/4");
  CHECK(to_string(Rational(5)) == "5");
  CHECK(from_double(0.375) == q(3, 8));
}

TEST_CASE("atom spaces reject duplicates and negative weights") {
  CHECK_THROWS(AtomSpace({{"a", 1}, {"a", 2}}));
  CHECK_THROWS(AtomSpace({{"a", -1}}));
  AtomSpace s({{"a", 1}, {"b", 0}, {"c", q(1, 2)}});
  CHECK(s.total() == q(3, 2));
  CHECK(*s.min_positive_weight() == q(1, 2));
  CHECK(s.index_of("c") == 2);
  CHECK_FALSE(s.find("z").has_value());
}

TEST_CASE("instances reject isolated positive atoms and unknown endpoints") {
  CHECK_THROWS(Instance(AtomSpace({{"x1", 1}, {"x2", 1}}), AtomSpace({{"y1", 1}}), {{"x1", "y1"}}));
  CHECK_THROWS(Instance(AtomSpace({{"x1", 1}}), AtomSpace({{"y1", 1}}), {{"x1", "y9"}}));
  CHECK_NOTHROW(Instance(AtomSpace({{"x1", 1}, {"x2", 0}}), AtomSpace({{"y1", 1}}), {{"x1", "y1"}}));
}

TEST_CASE("marginals") {
  auto inst = fixtures::i1();
  Measure m = marginal(fixtures::pi_cross(inst), 0);
  CHECK(m.at("x1") == 1);
  CHECK(m.at("x2") == 1);

  Plan empty(inst, 0);
  CHECK(marginal(empty, 1).total() == 0);

  auto i2 = fixtures::i2();
  Measure p = marginal(fixtures::plan(i2, 0, {{{"x1", "y1"}, 1}, {{"x2", "y2"}, 1}}), 1);
  CHECK(p.at("y1") == 1);
  CHECK(p.at("y2") == 1);
}

TEST_CASE("lebesgue decomposition on atoms") {
  auto s = space({1, 1, 1});
  auto split = lebesgue_decompose(measure(s, {2, 5, 3}), measure(s, {1, 0, 1}));
  CHECK(*split.density[0] == 2);
  CHECK_FALSE(split.density[1].has_value());
  CHECK(*split.density[2] == 3);
  CHECK(split.singular == measure(s, {0, 5, 0}));

  auto s2 = space({1, 1});
  auto id = lebesgue_decompose(measure(s2, {1, 1}), measure(s2, {1, 1}));
  CHECK(*id.density[0] == 1);
  CHECK(*id.density[1] == 1);
  CHECK(id.singular.total() == 0);

  auto z = lebesgue_decompose(measure(s2, {0, 4}), measure(s2, {2, 0}));
  CHECK(*z.density[0] == 0);
  CHECK_FALSE(z.density[1].has_value());
  CHECK(z.singular == measure(s2, {0, 4}));
}

TEST_CASE("is_refinement") {
  auto inst = fixtures::i1();
  CHECK(is_refinement(fixtures::pi_identity(inst)));
  CHECK(is_refinement(fixtures::pi_cross(inst)));
  CHECK_FALSE(is_refinement(fixtures::plan(inst, 0, {{{"x1", "y1"}, 2}})));
  auto i2 = fixtures::i2();
  Plan off(i2, 0);
  off.add(0, 1, 1);  // x1y2 is not an edge
  off.add(1, 1, 1);
  CHECK_FALSE(off.on_edges());
  CHECK_FALSE(is_refinement(off));
}

TEST_CASE("truncated payload") {
  auto inst = fixtures::i1();
  Measure t = truncated_payload(fixtures::pi_identity(inst), q(1, 2));
  CHECK(t.at("y1") == q(1, 2));
  CHECK(t.at("y2") == q(1, 2));
  CHECK(truncated_payload(fixtures::pi_cross(inst), 0).total() == 0);

  auto i4 = fixtures::i4();
  CHECK(truncated_payload(fixtures::plan(i4, 0, {{{"x1", "y2"}, 1}}), 5).total() == 0);
}

TEST_CASE("random plans: conservation, reconstruction, truncation balance") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = fixtures::random_instance(seed);
    for (int side = 0; side < 2; ++side) {
      Plan plan = random_feasible_plan(inst, side, seed);
      REQUIRE(is_refinement(plan));
      Measure m0 = marginal(plan, 0);
      Measure m1 = marginal(plan, 1);
      CHECK(m0.total() == plan.total());
      CHECK(m1.total() == plan.total());

      Measure nu = inst->reference(1 - side);
      Measure mu = payload(plan);
      auto split = lebesgue_decompose(mu, nu);
      CHECK(split.absolutely_continuous(nu) + split.singular == mu);

      OverflowProfile over = overflow_profile(plan);
      Measure previous = truncated_payload(plan, 0);
      for (long k = 0; k <= 12; ++k) {
        Rational t = q(k, 3);
        Measure now = truncated_payload(plan, t);
        CHECK(previous.dominated_by(now));
        CHECK(now.total() + over(t) == plan.total());
        previous = now;
      }
    }
  }
}
