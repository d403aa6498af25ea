#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "refinet/appendix_b.hpp"
#include "refinet/maximin.hpp"

#include <cmath>

using namespace refinet;

namespace {
Rational frac(long p, long q) { return Rational(p) / Rational(q); }
}  // namespace

TEST_CASE("strip family closed form") {
  CHECK(std::fabs(appendix_b_value(frac(3, 10), 4096) - 1.35) < 1e-8);
  CHECK(std::fabs(appendix_b_value(frac(1, 10), 4096) - (1.0 + 7.0 / 60.0)) < 1e-8);
  for (Rational e : {frac(1, 10), frac(1, 4), frac(2, 5)}) {
    double exact = 1.0 + 7.0 * to_double(e) / 6.0;
    CHECK(std::fabs(appendix_b_value(e, 4096) - exact) < 1e-8);
    CHECK(std::fabs(appendix_b_value(e, 64) - exact) >= std::fabs(appendix_b_value(e, 4096) - exact) - 1e-15);
  }
  double previous = 2.0;
  for (long k = 1; k <= 6; ++k) {
    double v = appendix_b_value(frac(1, 2 * k + 1), 4096);
    CHECK(v < previous);
    CHECK(v > 1.0);
    previous = v;
  }
}

TEST_CASE("strip family rejects bad arguments") {
  CHECK_THROWS_AS(appendix_b_value(0, 4096), std::invalid_argument);
  CHECK_THROWS_AS(appendix_b_value(frac(1, 2), 4096), std::invalid_argument);
  CHECK_THROWS_AS(appendix_b_value(frac(1, 4), 63), std::invalid_argument);
}

TEST_CASE("grid instances") {
  auto closed = grid_instance(8, GridRelation::Closed);
  CHECK(closed->edges().size() == 36);
  CHECK(closed->side(0).weight(3) == frac(1, 8));
  auto open = grid_instance(8, GridRelation::Open);
  CHECK(open->edges().size() == 28 + 2);
  CHECK(open->has_edge(0, 0));
  CHECK(open->has_edge(7, 7));
  CHECK_FALSE(open->has_edge(3, 3));
  CHECK_THROWS_AS(grid_instance(3, GridRelation::Closed), std::invalid_argument);
}

TEST_CASE("grid infima") {
  GridResult c32 = discretized_infimum(32, GridRelation::Closed);
  CHECK(std::fabs(c32.value - 1.0) < 1e-6);
  GridResult o32 = discretized_infimum(32, GridRelation::Open);
  GridResult o64 = discretized_infimum(64, GridRelation::Open);
  CHECK(o32.value > 1.0 + 1e-4);
  CHECK(o64.value <= o32.value + 1e-9);
  CHECK(o64.value >= 1.0 - 1e-9);

  // exact optimum via the level-optimal maximin payload
  for (int n : {8, 16, 32}) {
    for (auto rel : {GridRelation::Closed, GridRelation::Open}) {
      auto inst = grid_instance(n, rel);
      Plan best = solve_lom(inst, 0);
      Measure nu = inst->reference(1);
      Measure p = payload(best);
      Rational j = 0;
      for (std::size_t y = 0; y < nu.size(); ++y) j += p[y] * p[y] / nu[y];
      CHECK(std::fabs(discretized_infimum(n, rel).value - to_double(j)) < 1e-6);
      CHECK(j >= 1);
      if (rel == GridRelation::Open) CHECK(j == 1 + Rational(3) / (2 * n));
    }
  }
}
