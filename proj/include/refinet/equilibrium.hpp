#pragma once

// The induced exchange economy on both sides of a relation: allocation-price construction from a
// level-optimal maximin pair, Walras verification, and extraction of a refinement pair.

#include "refinet/measure.hpp"
#include "refinet/pairing.hpp"

#include <array>
#include <string>
#include <vector>

namespace refinet {

struct SddSide {
  Measure nu_ac;
  Measure nu_perp;
  Measure payload_ac;         // a.c. part of the payload the opposite plan delivers here
  std::vector<Rational> rho;  // payload_ac / nu; 0 off the a.c. carrier and on null atoms
  std::vector<bool> ac;       // positive-weight atoms receiving a.c. payload
};

struct SddResult {
  std::array<SddSide, 2> side;
};

// pi0 is a refinement from side 0, pi1 from side 1.
SddResult symmetric_density_decomposition(const Plan& pi0, const Plan& pi1);

struct Bundle {
  Measure part0;
  Measure part1;
  const Measure& part(int s) const { return s == 0 ? part0 : part1; }
};

struct Allocation {
  InstancePtr instance;
  std::array<std::vector<Bundle>, 2> bundle;  // bundle[s][i] belongs to agent i of side s
};

struct Price {
  std::array<std::vector<Rational>, 2> value;
};

struct Equilibrium {
  Allocation allocation;
  Price price;
};

// Throws std::runtime_error if the inputs violate the structure the construction relies on
// (a positive-weight atom in a bad set, or a.c. trade leaking onto singular carriers), and
// std::logic_error if the result fails verify_walras.
Equilibrium build_equilibrium(const Plan& pi0, const Plan& pi1);

struct WalrasReport {
  bool feasible = true;
  bool budget = true;
  bool optimal = true;
  bool price_valid = true;
  std::vector<std::string> failures;
  bool ok() const { return feasible && budget && optimal && price_valid; }
};

WalrasReport verify_walras(const Allocation& a, const Price& p);

struct ExtractedPair {
  Plan pi0;         // refinement from side 0, read off side-1 agents' side-0 consumption
  Plan pi1;         // refinement from side 1, read off side-0 agents' side-1 consumption
  Plan fallback0;   // part of pi0 routed through the fallback kernel
  Plan fallback1;
};

ExtractedPair extract_pair(const Allocation& a, FallbackPolicy fallback = FallbackPolicy::Uniform);

struct StructureReport {
  bool positive_price = true;
  bool fallback_singular = true;
  bool reciprocal = true;
  std::vector<std::string> failures;
  bool ok() const { return positive_price && fallback_singular && reciprocal; }
};

StructureReport structure_audit(const Allocation& a, const Price& p);

}  // namespace refinet
