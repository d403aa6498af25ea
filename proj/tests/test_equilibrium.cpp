#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "refinet/equilibrium.hpp"
#include "refinet/flow.hpp"
#include "refinet/maximin.hpp"
#include "refinet/pairing.hpp"

#include <set>

using namespace refinet;
using fixtures::plan;
using fixtures::q;

namespace {

Measure on(const InstancePtr& inst, int side, std::vector<Rational> mass) { return Measure(inst->side_ptr(side), std::move(mass)); }

struct Lom {
  Plan pi0;
  Plan pi1;
};

Lom lom_pair(const InstancePtr& inst, bool pr_second) {
  Plan pi0 = solve_lom(inst, 0);
  Plan pi1 = pr_second ? proportional_response(pi0) : solve_lom(inst, 1, {SingularPlacement::Uniform, true});
  return {pi0, pi1};
}

}  // namespace

TEST_CASE("symmetric density decomposition") {
  auto i1 = fixtures::i1();
  SddResult r = symmetric_density_decomposition(fixtures::pi_identity(i1), fixtures::pi_cross(i1));
  for (int s = 0; s < 2; ++s) {
    CHECK(r.side[s].rho == std::vector<Rational>{1, 1});
    CHECK(r.side[s].nu_perp.total() == 0);
    CHECK(r.side[s].nu_ac == i1->reference(s));
  }

  auto i4 = fixtures::i4();
  Plan p0 = plan(i4, 0, {{{"x1", "y2"}, 1}});
  SddResult r4 = symmetric_density_decomposition(p0, proportional_response(p0));
  CHECK(r4.side[0].nu_perp == i4->reference(0));
  CHECK(r4.side[1].payload_ac.total() == 0);
  CHECK_FALSE(r4.side[1].ac[1]);

  auto i2 = fixtures::i2();
  Lom l2 = lom_pair(i2, true);
  SddResult r2 = symmetric_density_decomposition(l2.pi0, l2.pi1);
  for (int s = 0; s < 2; ++s) {
    CHECK(r2.side[s].rho == std::vector<Rational>{1, 1});
    CHECK(r2.side[s].nu_perp.total() == 0);
  }

  CHECK_THROWS_AS(symmetric_density_decomposition(fixtures::pi_cross(i1), fixtures::pi_identity(i1)), std::invalid_argument);
}

TEST_CASE("build_equilibrium on the 2x2 market") {
  auto i1 = fixtures::i1();
  Equilibrium eq = build_equilibrium(fixtures::pi_identity(i1), fixtures::pi_cross(i1));
  for (int s = 0; s < 2; ++s)
    for (const auto& p : eq.price.value[s]) CHECK(p == q(1, 2));
  const auto& b = eq.allocation.bundle;
  CHECK(b[0][0].part0.total() == 0);
  CHECK(b[0][0].part1.values() == std::vector<Rational>{q(1, 4), q(3, 4)});
  CHECK(b[0][1].part0.total() == 0);
  CHECK(b[0][1].part1.values() == std::vector<Rational>{q(3, 4), q(1, 4)});
  CHECK(b[1][0].part0.values() == std::vector<Rational>{1, 0});
  CHECK(b[1][0].part1.total() == 0);
  CHECK(b[1][1].part0.values() == std::vector<Rational>{0, 1});
  CHECK(b[1][1].part1.total() == 0);
  CHECK(verify_walras(eq.allocation, eq.price).ok());
}

TEST_CASE("build_equilibrium on the null-atom instance") {
  auto i4 = fixtures::i4();
  Plan p0 = plan(i4, 0, {{{"x1", "y2"}, 1}});
  Equilibrium eq = build_equilibrium(p0, proportional_response(p0));
  CHECK(eq.price.value[0][0] == 0);
  CHECK(eq.price.value[1][1] == 2);
  CHECK(eq.allocation.bundle[0][0].part0.values() == std::vector<Rational>{1, 0});
  CHECK(eq.allocation.bundle[0][0].part1.total() == 0);
}

TEST_CASE("build_equilibrium on the path") {
  auto i2 = fixtures::i2();
  Lom l = lom_pair(i2, true);
  Equilibrium eq = build_equilibrium(l.pi0, l.pi1);
  for (int s = 0; s < 2; ++s)
    for (const auto& p : eq.price.value[s]) CHECK(p == q(1, 2));
  CHECK(eq.allocation.bundle[0][0].part1.values() == std::vector<Rational>{1, 0});
  CHECK(eq.allocation.bundle[0][1].part1.values() == std::vector<Rational>{0, 1});

  Plan bad = plan(i2, 0, {{{"x1", "y1"}, 1}, {{"x2", "y1"}, 1}});
  CHECK_THROWS_AS(build_equilibrium(bad, l.pi1), std::invalid_argument);
}

TEST_CASE("verify_walras failures") {
  auto i1 = fixtures::i1();
  Equilibrium eq = build_equilibrium(fixtures::pi_identity(i1), fixtures::pi_cross(i1));

  Price zero{{std::vector<Rational>(2, Rational(0)), std::vector<Rational>(2, Rational(0))}};
  WalrasReport z = verify_walras(eq.allocation, zero);
  CHECK_FALSE(z.price_valid);
  CHECK_FALSE(z.ok());

  Allocation greedy = eq.allocation;
  greedy.bundle[0][0].part1 = greedy.bundle[0][0].part1.scaled(2);
  WalrasReport g = verify_walras(greedy, eq.price);
  CHECK_FALSE(g.budget);
  bool names_x1 = false;
  for (const auto& f : g.failures) names_x1 = names_x1 || f.find("x1") != std::string::npos;
  CHECK(names_x1);

  Price negative = eq.price;
  negative.value[1][0] = -1;
  CHECK_FALSE(verify_walras(eq.allocation, negative).price_valid);
}

TEST_CASE("extract_pair") {
  auto i1 = fixtures::i1();
  Equilibrium eq = build_equilibrium(fixtures::pi_identity(i1), fixtures::pi_cross(i1));
  ExtractedPair p = extract_pair(eq.allocation);
  CHECK(p.pi0 == fixtures::pi_identity(i1));
  CHECK(p.pi1 == fixtures::pi_cross(i1));
  CHECK(p.fallback0.entries().empty());
  CHECK(p.fallback1.entries().empty());

  Allocation idle{i1, {}};
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < 2; ++i) {
      Bundle b{Measure(i1->side_ptr(0)), Measure(i1->side_ptr(1))};
      (s == 0 ? b.part0 : b.part1).set(i, 1);
      idle.bundle[s].push_back(b);
    }
  }
  ExtractedPair none = extract_pair(idle, FallbackPolicy::LowestIndex);
  CHECK(none.pi0 == none.fallback0);
  CHECK(none.pi1 == none.fallback1);
  CHECK(is_refinement(none.pi0));
  CHECK(is_refinement(none.pi1));

  auto i2 = fixtures::i2();
  Lom l = lom_pair(i2, true);
  ExtractedPair e2 = extract_pair(build_equilibrium(l.pi0, l.pi1).allocation);
  CHECK(e2.pi0 == l.pi0);
  CHECK(e2.pi1 == l.pi1);
}

TEST_CASE("structure audit") {
  auto i1 = fixtures::i1();
  Equilibrium eq = build_equilibrium(fixtures::pi_identity(i1), fixtures::pi_cross(i1));
  StructureReport r = structure_audit(eq.allocation, eq.price);
  CHECK(r.ok());

  auto i2 = fixtures::i2();
  Lom l = lom_pair(i2, true);
  Equilibrium e2 = build_equilibrium(l.pi0, l.pi1);
  CHECK(structure_audit(e2.allocation, e2.price).ok());

  Allocation bent = eq.allocation;
  bent.bundle[0][0].part1 = on(i1, 1, {q(1, 4), q(1, 2)});
  StructureReport b = structure_audit(bent, eq.price);
  CHECK_FALSE(b.reciprocal);
  bool flagged = false;
  for (const auto& f : b.failures) flagged = flagged || f.find("(x1, y1)") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("random suite: round trip and structure") {
  int built = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto inst = fixtures::random_instance(seed + 60000);
    for (bool pr : {true, false}) {
      Lom l = lom_pair(inst, pr);
      Equilibrium eq = build_equilibrium(l.pi0, l.pi1);
      ++built;
      CHECK(verify_walras(eq.allocation, eq.price).ok());
      for (auto policy : {FallbackPolicy::Uniform, FallbackPolicy::LowestIndex}) {
        ExtractedPair back = extract_pair(eq.allocation, policy);
        CHECK(verify_lom(back.pi0).verdict);
        CHECK(verify_lom(back.pi1).verdict);
      }
      StructureReport sr = structure_audit(eq.allocation, eq.price);
      CHECK_MESSAGE(sr.ok(), (sr.failures.empty() ? std::string() : sr.failures.front()));

      SddResult sdd = symmetric_density_decomposition(l.pi0, l.pi1);
      // Mass delivered to null atoms leaves atoms that receive no a.c. payload.
      const Plan* out[2] = {&l.pi0, &l.pi1};
      for (int s = 0; s < 2; ++s) {
        for (const auto& [k, m] : out[s]->entries()) {
          std::size_t src = s == 0 ? k.first : k.second;
          std::size_t dst = s == 0 ? k.second : k.first;
          if (inst->side(1 - s).weight(dst) == 0) CHECK_FALSE(sdd.side[s].ac[src]);
        }
      }
      // No subflow from {rho0 <= t} into the a.c. part of {rho1 < 1/t}.
      std::set<Rational> levels;
      for (const auto& r : sdd.side[0].rho)
        if (r > 0) levels.insert(r);
      for (const auto& r : sdd.side[1].rho)
        if (r > 0) levels.insert(1 / r);
      for (long k = 1; k <= 8; ++k) levels.insert(q(k, 2));
      for (const auto& t : levels) {
        Measure a(inst->side_ptr(0)), b(inst->side_ptr(1));
        for (std::size_t x = 0; x < a.size(); ++x)
          if (sdd.side[0].rho[x] <= t) a.set(x, inst->side(0).weight(x));
        for (std::size_t y = 0; y < b.size(); ++y)
          if (sdd.side[1].rho[y] * t < 1) b.set(y, sdd.side[1].nu_ac[y]);
        CHECK(max_feasible_mass(inst, 0, a, b).value == 0);
      }
    }
  }
  CHECK(built == 240);
}
