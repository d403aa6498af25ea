#pragma once

// Exact max-flow on small networks, the Fit functional and its breakpoints.

#include "refinet/measure.hpp"
#include "refinet/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace refinet {

// Directed network with exact capacities; std::nullopt means unbounded.
// Edmonds-Karp: shortest augmenting paths, so it terminates on rational data.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes);

  std::size_t add_arc(std::size_t from, std::size_t to, std::optional<Rational> capacity);
  // Raising a capacity keeps the current flow valid, so solve() can resume from it.
  void set_capacity(std::size_t arc, std::optional<Rational> capacity);
  // Returns the flow added by this call.
  Rational solve(std::size_t source, std::size_t sink);

  const Rational& flow(std::size_t arc) const { return arcs_.at(2 * arc).flow; }
  // Nodes reachable from `source` in the residual graph of the last solve.
  std::vector<bool> residual_reachable(std::size_t source) const;

 private:
  struct Arc {
    std::size_t to;
    std::optional<Rational> capacity;
    Rational flow = 0;
  };
  bool has_residual(const Arc& a) const { return !a.capacity || a.flow < *a.capacity; }

  std::vector<Arc> arcs_;  // arc 2k is forward, 2k+1 its reverse
  std::vector<std::vector<std::size_t>> out_;
};

struct FlowResult {
  Plan plan;
  Rational value;
  // Source-side atoms outside the residual-reachable set; value = a(C) + b(N(C^c)).
  std::vector<std::size_t> cut;
};

struct FlowOptions {
  // Visit relation arcs in reverse order; yields a different optimal plan on degenerate inputs.
  bool reverse_arcs = false;
};

// Largest subplan with source marginal <= a (side `side`) and opposite marginal <= b.
FlowResult max_feasible_mass(const InstancePtr& instance, int side, const Measure& a, const Measure& b,
                             const FlowOptions& options = {});

// Opposite-side neighborhood of a set of source atoms, including weight-0 atoms.
std::vector<std::size_t> neighborhood(const Instance& instance, int side, const std::vector<std::size_t>& atoms);
// Complement of `atoms` in side `side`.
std::vector<std::size_t> complement(const Instance& instance, int side, const std::vector<std::size_t>& atoms);
Rational cut_value(const Instance& instance, int side, const Measure& a, const Measure& b,
                   const std::vector<std::size_t>& cut);

Rational fit(const InstancePtr& instance, int side, const Rational& t);

// Concave piecewise-linear function of t >= 0 built from nested cuts.
struct PiecewiseLinear {
  struct Segment {
    Rational start;
    std::optional<Rational> end;  // nullopt on the final, constant segment
    Rational intercept;
    Rational slope;
    std::vector<std::size_t> cut;
  };
  std::vector<Segment> segments;
  Rational fit_infinity;

  Rational evaluate(const Rational& t) const;
  // Interior breakpoints, ascending (segment boundaries other than 0).
  std::vector<Rational> breakpoints() const;
};

PiecewiseLinear fit_breakpoints(const InstancePtr& instance, int side);

struct AugmentingSubplan {
  Plan gamma;
  Plan gamma0;
};

// Finite network of the augmenting-subplan argument: forward arcs along sigma, backward arcs
// along sigma0, source capacities (xi - xi0)_+ and sink capacities (b - psi0).
AugmentingSubplan augmenting_subplan(const Plan& sigma, const Plan& sigma0, const Measure& b);

}  // namespace refinet
