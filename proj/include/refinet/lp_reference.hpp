#pragma once

// Brute-force reference oracles. Nothing here calls into the flow, divergence or
// maximin code; tests compare those modules against these.

#include "refinet/divergence.hpp"
#include "refinet/measure.hpp"
#include "refinet/rational.hpp"

#include <cstdint>
#include <vector>

namespace refinet {

// max sum sigma_e over sigma >= 0 on edges, source marginals <= nu, opposite marginals <= t*nu,
// by exact tableau simplex with Bland's rule.
Rational lp_fit(const InstancePtr& instance, int side, const Rational& t);

struct OracleResult {
  Plan plan;
  double value;  // +inf when the divergence is forced to be infinite
  int iterations;
};

struct OracleOptions {
  int max_iterations = 200000;
  // Consecutive near-stalled iterations required before stopping.
  int patience = 25;
};

// Accelerated projected descent over the row simplices of the refinement polytope, from the
// barycentric plan. Never a certificate; it only falsifies.
OracleResult min_divergence_oracle(const InstancePtr& instance, int side, const Integrand& theta, double tol,
                                   const OracleOptions& options = {});

// Each positive source atom split over its neighbors by seeded random integer weights.
Plan random_feasible_plan(const InstancePtr& instance, int side, std::uint64_t seed);

// Vertices of {plans on edges with source marginal nu}: every positive source atom sends all of
// its mass to one neighbor. Throws std::invalid_argument above 12 edges.
std::vector<Plan> enumerate_extreme_plans(const InstancePtr& instance, int side);

}  // namespace refinet
