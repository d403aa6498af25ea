#include "refinet/pairing.hpp"

#include "refinet/lp_reference.hpp"
#include "refinet/maximin.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace refinet {

namespace {

void require_refinement(const Plan& plan) {
  if (!is_refinement(plan)) throw std::invalid_argument("plan is not a refinement");
}

std::size_t src_index(int side, const EdgeKey& k) { return side == 0 ? k.first : k.second; }
std::size_t opp_index(int side, const EdgeKey& k) { return side == 0 ? k.second : k.first; }
EdgeKey key_of(int side, std::size_t src, std::size_t opp) { return side == 0 ? EdgeKey{src, opp} : EdgeKey{opp, src}; }

}  // namespace

ReverseKernel reverse_kernel(const Plan& plan) {
  require_refinement(plan);
  int side = plan.source_side();
  Measure load = payload(plan);
  ReverseKernel kernel{plan.opposite_side(), std::vector<std::optional<std::map<std::size_t, Rational>>>(load.size())};
  for (const auto& [k, mass] : plan.entries()) {
    std::size_t j = opp_index(side, k);
    if (!kernel.rows[j]) kernel.rows[j].emplace();
    (*kernel.rows[j])[src_index(side, k)] += mass / load[j];
  }
  return kernel;
}

std::map<std::size_t, Rational> fallback_row(const Instance& instance, int side, std::size_t atom, FallbackPolicy policy) {
  const auto& nb = instance.neighbors(side, atom);
  if (nb.empty()) throw std::invalid_argument("fallback needed at an atom without neighbors");
  std::map<std::size_t, Rational> row;
  if (policy == FallbackPolicy::LowestIndex) {
    row[nb.front()] = 1;
  } else {
    for (std::size_t i : nb) row[i] = Rational(1) / Rational(nb.size());
  }
  return row;
}

Plan proportional_response(const Plan& plan, FallbackPolicy fallback) {
  ReverseKernel kernel = reverse_kernel(plan);
  const Instance& inst = plan.instance();
  int side = kernel.row_side;  // the response is a refinement from this side
  const AtomSpace& atoms = inst.side(side);
  Plan out(plan.instance_ptr(), side);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms.weight(j) == 0) continue;
    auto row = kernel.rows[j] ? *kernel.rows[j] : fallback_row(inst, side, j, fallback);
    for (const auto& [i, prob] : row) {
      auto [x, y] = key_of(side, j, i);
      out.add(x, y, atoms.weight(j) * prob);
    }
  }
  return out;
}

ExtendedValue paired_divergence(const Plan& first, const Plan& second, const Integrand& theta) {
  if (first.instance_ptr() != second.instance_ptr()) throw std::invalid_argument("plans live on different instances");
  std::set<EdgeKey> keys;
  for (const auto& e : first.instance().edges()) keys.insert({e.x, e.y});
  for (const auto& [k, m] : first.entries()) keys.insert(k);
  for (const auto& [k, m] : second.entries()) keys.insert(k);
  std::vector<Atom> atoms;
  std::vector<Rational> p, q;
  const Instance& inst = first.instance();
  for (const auto& k : keys) {
    atoms.push_back({inst.side(0).id(k.first) + "|" + inst.side(1).id(k.second), Rational(0)});
    p.push_back(first.mass(k.first, k.second));
    q.push_back(second.mass(k.first, k.second));
  }
  auto space = std::make_shared<const AtomSpace>(std::move(atoms));
  return f_divergence(Measure(space, std::move(p)), Measure(space, std::move(q)), theta);
}

ClosestPair solve_closest_pair(const InstancePtr& instance, int side, const Integrand& /*theta*/) {
  Plan first = solve_lom(instance, side);
  Plan second = proportional_response(first);
  return {std::move(first), std::move(second)};
}

namespace {

// HS_gamma between two plans viewed on pairs of atoms, straight from the entries.
Rational paired_hockey_stick(const Plan& first, const Plan& second, const Rational& gamma) {
  Rational sum = 0;
  for (const auto& [k, m] : first.entries()) {
    Rational other = second.mass(k.first, k.second);
    sum += other > 0 ? positive_part(m - gamma * other) : m;
  }
  return sum;
}

void add_ratios(const Plan& first, const Plan& second, std::set<Rational>& out) {
  for (const auto& [k, m] : first.entries()) {
    Rational other = second.mass(k.first, k.second);
    if (other > 0) out.insert(m / other);
  }
}

}  // namespace

std::vector<Rational> default_gamma_grid(const Plan& first, const Plan& second) {
  std::set<Rational> grid;
  for (int k = 0; k <= 8; ++k) grid.insert(Rational(1 << k) / Rational(8));
  add_ratios(first, second, grid);
  grid.erase(Rational(0));
  return {grid.begin(), grid.end()};
}

PairReport universal_audit(const ClosestPair& pair, int n_competitors, const std::vector<Rational>& gamma_grid,
                           std::uint64_t seed) {
  const InstancePtr& instance = pair.first.instance_ptr();
  int side = pair.first.source_side();
  if (pair.second.instance_ptr() != instance || pair.second.source_side() != 1 - side) {
    throw std::invalid_argument("pair must consist of refinements from opposite sides of one instance");
  }
  require_refinement(pair.first);
  require_refinement(pair.second);
  for (const auto& g : gamma_grid)
    if (g <= 0) throw std::invalid_argument("gamma must be positive");

  std::vector<std::pair<Plan, Plan>> competitors;
  for (int k = 0; k < n_competitors; ++k) {
    Plan a = random_feasible_plan(instance, side, seed + 2 * static_cast<std::uint64_t>(k));
    Plan b = random_feasible_plan(instance, 1 - side, seed + 2 * static_cast<std::uint64_t>(k) + 1);
    competitors.emplace_back(a, b);
    competitors.emplace_back(a, proportional_response(a));
  }
  if (instance->edges().size() <= 12) {
    auto firsts = enumerate_extreme_plans(instance, side);
    auto seconds = enumerate_extreme_plans(instance, 1 - side);
    for (const auto& a : firsts)
      for (const auto& b : seconds) competitors.emplace_back(a, b);
  }

  PairReport report;
  report.competitors = competitors.size();
  for (const auto& g : gamma_grid) report.rows.push_back({g, paired_hockey_stick(pair.first, pair.second, g), std::nullopt});

  auto violation = [&](const std::string& what) {
    report.verdict = false;
    if (report.violations.size() < 20) report.violations.push_back(what);
  };

  OverflowProfile mine = overflow_profile(pair.first);
  for (std::size_t c = 0; c < competitors.size(); ++c) {
    const auto& [a, b] = competitors[c];
    for (auto& row : report.rows) {
      Rational v = paired_hockey_stick(a, b, row.gamma);
      if (!row.best_competitor || v < *row.best_competitor) row.best_competitor = v;
      if (row.pair_value > v) violation("competitor " + std::to_string(c) + " beats the pair at gamma " + to_string(row.gamma));
    }
    // The competitor's own kinks make the comparison conclusive for this pair of plans.
    std::set<Rational> extra;
    add_ratios(a, b, extra);
    for (const auto& g : extra) {
      if (g <= 0) continue;
      if (paired_hockey_stick(pair.first, pair.second, g) > paired_hockey_stick(a, b, g)) {
        violation("competitor " + std::to_string(c) + " beats the pair at its ratio " + to_string(g));
      }
    }
    OverflowProfile theirs = overflow_profile(a);
    std::set<Rational> levels{Rational(0)};
    for (const auto& t : mine.breakpoints()) levels.insert(t);
    for (const auto& t : theirs.breakpoints()) levels.insert(t);
    for (const auto& t : levels) {
      if (mine(t) > theirs(t)) {
        report.overflow_dominance = false;
        violation("overflow of competitor " + std::to_string(c) + " is smaller at t = " + to_string(t));
        break;
      }
    }
  }
  return report;
}

}  // namespace refinet
