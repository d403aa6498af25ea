#pragma once

// Proportional response, paired divergences and the universal-closestness audit.

#include "refinet/divergence.hpp"
#include "refinet/measure.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace refinet {

enum class FallbackPolicy { Uniform, LowestIndex };

// Reverse conditional of a plan: for each opposite atom with positive payload, the
// distribution of its incoming mass over source atoms.
struct ReverseKernel {
  int row_side;  // side of the atoms indexing the rows
  std::vector<std::optional<std::map<std::size_t, Rational>>> rows;
};

ReverseKernel reverse_kernel(const Plan& plan);

// Probability row over N(y) used where the payload vanishes.
std::map<std::size_t, Rational> fallback_row(const Instance& instance, int side, std::size_t atom, FallbackPolicy policy);

// Refinement from the opposite side: nu pushed through the reverse kernel, fallback where P = 0.
Plan proportional_response(const Plan& plan, FallbackPolicy fallback = FallbackPolicy::Uniform);

// Divergence of the two plans as measures on pairs of atoms (first argument against second).
ExtendedValue paired_divergence(const Plan& first, const Plan& second, const Integrand& theta);

struct ClosestPair {
  Plan first;   // level-optimal maximin from `side`
  Plan second;  // its proportional response
};

// Universally closest for every DPI divergence; theta only names the target and is not needed
// by the construction.
ClosestPair solve_closest_pair(const InstancePtr& instance, int side, const Integrand& theta);

struct GammaRow {
  Rational gamma;
  Rational pair_value;
  std::optional<Rational> best_competitor;
};

struct PairReport {
  std::vector<GammaRow> rows;
  std::size_t competitors = 0;
  bool overflow_dominance = true;
  bool verdict = true;
  std::vector<std::string> violations;
};

// {2^k/8 : k = 0..8} plus every ratio first/second occurring on a pair of atoms.
std::vector<Rational> default_gamma_grid(const Plan& first, const Plan& second);

// Competitors: seeded random pairs, each random plan with its proportional response, and all
// vertex pairs when the instance has at most 12 edges. n_competitors counts the random draws.
PairReport universal_audit(const ClosestPair& pair, int n_competitors, const std::vector<Rational>& gamma_grid,
                           std::uint64_t seed);

}  // namespace refinet
