#pragma once

// Level-optimal maximin refinements: overflow profiles, construction and exact verification.

#include "refinet/flow.hpp"
#include "refinet/measure.hpp"
#include "refinet/overflow.hpp"

#include <optional>
#include <string>
#include <vector>

namespace refinet {

OverflowProfile overflow_profile(const Plan& plan);

struct OverflowSplit {
  Plan sigma;     // opposite marginal (r ∧ t) nu
  Plan overflow;  // total mass Over(t)
};

// Scales each opposite atom's incoming mass by min(r, t)/r (0 on null atoms).
OverflowSplit overflow_decompose(const Plan& plan, const Rational& t);

enum class SingularPlacement { LowestIndex, Uniform };

struct LomOptions {
  SingularPlacement placement = SingularPlacement::LowestIndex;
  bool reverse_arcs = false;
};

// Per-atom density of the a.c. payload shared by every level-optimal maximin plan, read off the
// nested certifying cuts of Fit.
std::vector<Rational> target_density(const Instance& instance, int side, const PiecewiseLinear& fit);

// Always returns a plan that passed verify_lom; throws std::runtime_error otherwise.
Plan solve_lom(const InstancePtr& instance, int side, const LomOptions& options = {});

struct LevelCheck {
  Rational level;
  Rational truncated;
  Rational fit;
  bool midpoint;
};

struct LomCertificate {
  std::vector<LevelCheck> levels;
  bool verdict = true;
  // Smallest failing breakpoint level (a midpoint only if no breakpoint fails).
  std::optional<Rational> first_failure;
  std::vector<Rational> failures;
};

// Compares truncated payload mass with Fit at every breakpoint of both functions,
// every midpoint between them, and one level past the last breakpoint.
LomCertificate verify_lom(const Plan& plan);

// Equality of the a.c. parts of the two opposite marginals.
bool unique_ac_audit(const Plan& a, const Plan& b);

bool pointwise_local_maximin_check(const Plan& plan);

struct WeaknessCase {
  std::string name;
  std::string description;
  bool pointwise;
  bool lom;
};

// Zero-weight-atom stand-ins for the pointwise-check weakness example; reported, not asserted.
std::vector<WeaknessCase> weakness_experiment();

}  // namespace refinet
