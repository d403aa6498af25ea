#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "refinet/divergence.hpp"
#include "refinet/lp_reference.hpp"
#include "refinet/maximin.hpp"

#include <cmath>
#include <set>

using namespace refinet;
using fixtures::plan;
using fixtures::q;

TEST_CASE("lp_fit examples") {
  CHECK(lp_fit(fixtures::i1(), 0, q(1, 2)) == 1);
  CHECK(lp_fit(fixtures::i2(), 0, q(3, 2)) == 2);
  CHECK(lp_fit(fixtures::i2(), 0, q(1, 2)) == 1);
  CHECK(lp_fit(fixtures::i3(), 1, q(1, 4)) == q(1, 2));
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(lp_fit(fixtures::random_instance(seed), 0, 0) == 0);
  CHECK(lp_fit(fixtures::i4(), 0, 3) == 0);
}

TEST_CASE("min_divergence_oracle examples") {
  auto i1 = fixtures::i1();
  OracleResult r = min_divergence_oracle(i1, 0, exp_neg_integrand(), 1e-12);
  CHECK(std::fabs(r.value - 2 * std::exp(-1.0)) < 1e-9);
  CHECK(is_refinement(r.plan));

  // the only feasible plan sends x1 into the null atom y2
  auto i4 = fixtures::i4();
  Integrand hs = hockey_stick_integrand(q(1, 2));
  OracleResult r4 = min_divergence_oracle(i4, 0, hs, 1e-12);
  CHECK(r4.value == doctest::Approx(1.0));  // slope 1 on mass 1, theta(0) = 0 on y1
  OracleResult e4 = min_divergence_oracle(i4, 0, exp_neg_integrand(), 1e-12);
  CHECK(e4.value == doctest::Approx(1.0));  // theta(0) = 1 on y1, slope 0
  CHECK(std::isinf(min_divergence_oracle(i4, 0, square_integrand(), 1e-12).value));

  auto single = fixtures::make(AtomSpace({{"x", 3}}), AtomSpace({{"y", 2}}), {{"x", "y"}});
  OracleResult s = min_divergence_oracle(single, 0, square_integrand(), 1e-12);
  CHECK(s.value == doctest::Approx(2.0 * 1.5 * 1.5));
  CHECK(s.plan == fixtures::plan(single, 0, {{{"x", "y"}, 3}}));
}

TEST_CASE("random feasible plans") {
  auto i1 = fixtures::i1();
  CHECK(random_feasible_plan(i1, 0, 7) == random_feasible_plan(i1, 0, 7));
  CHECK(is_refinement(random_feasible_plan(i1, 0, 7)));
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto inst = fixtures::random_instance(seed % 97);
    CHECK(is_refinement(random_feasible_plan(inst, static_cast<int>(seed % 2), seed)));
  }
}

TEST_CASE("extreme plans") {
  auto i1 = fixtures::i1();
  auto v1 = enumerate_extreme_plans(i1, 0);
  CHECK(v1.size() == 4);
  Plan anti = plan(i1, 0, {{{"x1", "y2"}, 1}, {{"x2", "y1"}, 1}});
  CHECK(std::count(v1.begin(), v1.end(), fixtures::pi_identity(i1)) == 1);
  CHECK(std::count(v1.begin(), v1.end(), anti) == 1);

  auto single = fixtures::make(AtomSpace({{"x", 1}}), AtomSpace({{"y", 1}}), {{"x", "y"}});
  CHECK(enumerate_extreme_plans(single, 0).size() == 1);

  auto v2 = enumerate_extreme_plans(fixtures::i2(), 0);
  CHECK(v2.size() == 2);
  for (const auto& p : v2) CHECK(is_refinement(p));

  fixtures::RandomSpec big;
  big.max_atoms = 6;
  big.max_edges = 30;
  big.zero_weight_chance = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto inst = fixtures::random_instance(seed, big);
    if (inst->edges().size() > 12) {
      CHECK_THROWS_AS(enumerate_extreme_plans(inst, 0), std::invalid_argument);
      break;
    }
  }
}

TEST_CASE("oracle never beats the level-optimal maximin payload") {
  std::vector<Integrand> strict = {exp_neg_integrand(), square_integrand(), x_log_x_integrand(), chi_square_integrand()};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto inst = fixtures::random_instance(seed + 80000);
    int side = static_cast<int>(seed % 2);
    Plan best = solve_lom(inst, side);
    Measure nu = inst->reference(1 - side);
    for (const auto& theta : strict) {
      ExtendedValue exact = f_divergence(payload(best), nu, theta);
      OracleResult r = min_divergence_oracle(inst, side, theta, 1e-12);
      if (exact.is_pos_inf()) {
        CHECK(std::isinf(r.value));
      } else {
        CHECK(r.value >= exact.to_double() - 1e-6);
        CHECK(r.value <= exact.to_double() + 1e-4);
      }
    }
  }
}

TEST_CASE("vertex plans never beat the level-optimal maximin plan on hockey sticks") {
  fixtures::RandomSpec spec;
  spec.max_atoms = 4;
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    auto inst = fixtures::random_instance(seed + 90000, spec);
    if (inst->edges().size() > 12) continue;
    for (int side = 0; side < 2; ++side) {
      Plan best = solve_lom(inst, side);
      Measure nu = inst->reference(1 - side);
      std::set<Rational> gammas;
      for (int k = 0; k <= 8; ++k) gammas.insert(Rational(1 << k) / 8);
      for (const auto& r : overflow_profile(best).breakpoints())
        if (r > 0) gammas.insert(r);
      for (const auto& v : enumerate_extreme_plans(inst, side))
        for (const auto& g : gammas) CHECK(hockey_stick(payload(best), nu, g) <= hockey_stick(payload(v), nu, g));
    }
  }
}
