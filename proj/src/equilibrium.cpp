#include "refinet/equilibrium.hpp"

#include "refinet/maximin.hpp"

#include <algorithm>
#include <stdexcept>

namespace refinet {

namespace {

std::string label(const Instance& inst, int side, std::size_t i) { return inst.side(side).id(i); }

std::string edge_label(const Instance& inst, std::size_t x, std::size_t y) {
  return "(" + inst.side(0).id(x) + ", " + inst.side(1).id(y) + ")";
}

void check_pair(const Plan& pi0, const Plan& pi1) {
  if (pi0.source_side() != 0 || pi1.source_side() != 1) {
    throw std::invalid_argument("expected a refinement from side 0 and one from side 1");
  }
  if (pi0.instance_ptr() != pi1.instance_ptr()) throw std::invalid_argument("plans live on different instances");
  if (!is_refinement(pi0) || !is_refinement(pi1)) throw std::invalid_argument("plans must be refinements");
}

Rational mass_on(const Measure& m, const std::vector<std::size_t>& atoms) {
  Rational s = 0;
  for (std::size_t i : atoms) s += m[i];
  return s;
}

}  // namespace

SddResult symmetric_density_decomposition(const Plan& pi0, const Plan& pi1) {
  check_pair(pi0, pi1);
  const Instance& inst = pi0.instance();
  const Plan* incoming[2] = {&pi1, &pi0};
  SddResult out{{SddSide{Measure(inst.side_ptr(0)), Measure(inst.side_ptr(0)), Measure(inst.side_ptr(0)), {}, {}},
                 SddSide{Measure(inst.side_ptr(1)), Measure(inst.side_ptr(1)), Measure(inst.side_ptr(1)), {}, {}}}};
  for (int s = 0; s < 2; ++s) {
    Measure nu = inst.reference(s);
    LebesgueSplit split = lebesgue_decompose(marginal(*incoming[s], s), nu);
    SddSide& side = out.side[s];
    side.payload_ac = split.absolutely_continuous(nu);
    side.rho.assign(nu.size(), Rational(0));
    side.ac.assign(nu.size(), false);
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (side.payload_ac[i] > 0) {
        side.ac[i] = true;
        side.nu_ac.set(i, nu[i]);
        side.rho[i] = *split.density[i];
      } else {
        side.nu_perp.set(i, nu[i]);
      }
    }
  }
  return out;
}

Equilibrium build_equilibrium(const Plan& pi0, const Plan& pi1) {
  check_pair(pi0, pi1);
  if (!verify_lom(pi0).verdict || !verify_lom(pi1).verdict) {
    throw std::invalid_argument("both plans must be level-optimal maximin");
  }
  const InstancePtr& instance = pi0.instance_ptr();
  const Instance& inst = *instance;
  SddResult sdd = symmetric_density_decomposition(pi0, pi1);
  const Plan* outgoing[2] = {&pi0, &pi1};

  // a.c. trade must stay between a.c. carriers.
  for (int s = 0; s < 2; ++s) {
    for (const auto& [k, m] : outgoing[s]->entries()) {
      std::size_t src = s == 0 ? k.first : k.second;
      std::size_t dst = s == 0 ? k.second : k.first;
      if (sdd.side[1 - s].ac[dst] && !sdd.side[s].ac[src]) {
        throw std::runtime_error("a.c. payload at " + label(inst, 1 - s, dst) + " is fed from the singular carrier " +
                                 label(inst, s, src));
      }
    }
  }

  Equilibrium eq{Allocation{instance, {}}, Price{}};
  for (int s = 0; s < 2; ++s) {
    const AtomSpace& atoms = inst.side(s);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      Bundle b{Measure(inst.side_ptr(0)), Measure(inst.side_ptr(1))};
      Measure& own = s == 0 ? b.part0 : b.part1;
      Measure& other = s == 0 ? b.part1 : b.part0;
      if (sdd.side[s].ac[i]) {
        // Reverse kernel of the opposite plan's a.c. part.
        for (std::size_t j : inst.neighbors(s, i)) {
          if (!sdd.side[1 - s].ac[j]) continue;
          Rational m = s == 0 ? pi1.mass(i, j) : pi0.mass(j, i);
          if (m > 0) other.set(j, m / atoms.weight(i));
        }
      } else {
        own.set(i, Rational(1));
      }
      eq.allocation.bundle[s].push_back(std::move(b));
    }
  }

  std::array<std::vector<bool>, 2> bad{std::vector<bool>(inst.side(0).size(), false),
                                       std::vector<bool>(inst.side(1).size(), false)};
  for (int s = 0; s < 2; ++s) {
    const AtomSpace& atoms = inst.side(s);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms.weight(i) == 0) continue;
      for (std::size_t j : inst.neighbors(s, i)) {
        bool singular_here = !sdd.side[s].ac[i];
        bool cheap = sdd.side[s].rho[i] * sdd.side[1 - s].rho[j] < 1;
        if (singular_here || cheap) bad[1 - s][j] = true;
      }
    }
  }
  for (int s = 0; s < 2; ++s) {
    const AtomSpace& atoms = inst.side(s);
    auto& price = eq.price.value[s];
    price.assign(atoms.size(), Rational(0));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (bad[s][i] && atoms.weight(i) > 0) {
        throw std::runtime_error("positive-weight atom " + label(inst, s, i) + " lands in a bad neighborhood");
      }
      if (bad[s][i] || atoms.weight(i) == 0) {
        price[i] = 2;
      } else if (sdd.side[s].ac[i]) {
        price[i] = sdd.side[s].rho[i] / (1 + sdd.side[s].rho[i]);
      }
    }
  }

  WalrasReport report = verify_walras(eq.allocation, eq.price);
  if (!report.ok()) {
    throw std::logic_error("constructed pair fails Walras verification: " +
                           (report.failures.empty() ? std::string("?") : report.failures.front()));
  }
  return eq;
}

WalrasReport verify_walras(const Allocation& a, const Price& p) {
  if (!a.instance) throw std::invalid_argument("allocation has no instance");
  const Instance& inst = *a.instance;
  WalrasReport report;
  auto fail = [&](bool WalrasReport::*flag, std::string what) {
    report.*flag = false;
    report.failures.push_back(std::move(what));
  };
  for (int s = 0; s < 2; ++s) {
    if (a.bundle[s].size() != inst.side(s).size() || p.value[s].size() != inst.side(s).size()) {
      throw std::invalid_argument("allocation or price does not match the instance");
    }
  }

  bool any_positive = false;
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < p.value[s].size(); ++i) {
      if (p.value[s][i] < 0) fail(&WalrasReport::price_valid, "negative price at " + label(inst, s, i));
      if (p.value[s][i] > 0) any_positive = true;
    }
  }
  if (!any_positive) fail(&WalrasReport::price_valid, "price vanishes identically");

  std::array<Measure, 2> supply{Measure(inst.side_ptr(0)), Measure(inst.side_ptr(1))};
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      const Rational& w = inst.side(s).weight(i);
      if (w == 0) continue;
      for (int r = 0; r < 2; ++r) {
        const Measure& part = a.bundle[s][i].part(r);
        for (std::size_t j = 0; j < part.size(); ++j)
          if (part[j] != 0) supply[r].add(j, w * part[j]);
      }
    }
  }
  for (int r = 0; r < 2; ++r) {
    Measure nu = inst.reference(r);
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (supply[r][j] != nu[j]) {
        fail(&WalrasReport::feasible, "allocated mass " + to_string(supply[r][j]) + " at " + label(inst, r, j) +
                                          " differs from the endowment " + to_string(nu[j]));
      }
    }
  }

  // Only positive-weight agents matter; the rest form a null set.
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      if (inst.side(s).weight(i) == 0) continue;
      const Bundle& b = a.bundle[s][i];
      const Measure& own = b.part(s);
      const Measure& other = b.part(1 - s);
      const auto& nb = inst.neighbors(s, i);
      std::string who = label(inst, s, i);

      Rational cost = 0;
      for (int r = 0; r < 2; ++r) {
        const Measure& part = b.part(r);
        for (std::size_t j = 0; j < part.size(); ++j) cost += p.value[r][j] * part[j];
      }
      if (cost > p.value[s][i]) {
        fail(&WalrasReport::budget, "agent " + who + " spends " + to_string(cost) + " above its budget " +
                                        to_string(p.value[s][i]));
      }

      bool in_consumption_set = true;
      for (std::size_t j = 0; j < own.size(); ++j)
        if (own[j] != 0 && j != i) in_consumption_set = false;
      for (std::size_t j = 0; j < other.size(); ++j)
        if (other[j] != 0 && !std::binary_search(nb.begin(), nb.end(), j)) in_consumption_set = false;
      if (!in_consumption_set) fail(&WalrasReport::optimal, "agent " + who + " consumes outside its consumption set");

      Rational cheapest = p.value[1 - s][nb.front()];
      for (std::size_t j : nb) cheapest = rmin(cheapest, p.value[1 - s][j]);
      if (cheapest == 0) {
        fail(&WalrasReport::optimal, "agent " + who + " faces a free neighbor, so utility is unbounded");
        continue;
      }
      Rational best = p.value[s][i] / cheapest;
      Rational utility = mass_on(other, nb);
      if (utility != best) {
        fail(&WalrasReport::optimal, "agent " + who + " gets utility " + to_string(utility) + " but could afford " +
                                         to_string(best));
      }
    }
  }
  return report;
}

ExtractedPair extract_pair(const Allocation& a, FallbackPolicy fallback) {
  if (!a.instance) throw std::invalid_argument("allocation has no instance");
  const Instance& inst = *a.instance;
  ExtractedPair out{Plan(a.instance, 0), Plan(a.instance, 1), Plan(a.instance, 0), Plan(a.instance, 1)};
  Plan* plans[2] = {&out.pi0, &out.pi1};
  Plan* fallbacks[2] = {&out.fallback0, &out.fallback1};
  for (int s = 0; s < 2; ++s) {
    // Refinement from side s: side-(1-s) agents' graph-compatible consumption of side s.
    int buyers = 1 - s;
    Plan& plan = *plans[s];
    for (std::size_t j = 0; j < inst.side(buyers).size(); ++j) {
      const Rational& w = inst.side(buyers).weight(j);
      if (w == 0) continue;
      const Measure& part = a.bundle[buyers][j].part(s);
      for (std::size_t i : inst.neighbors(buyers, j)) {
        if (part[i] == 0) continue;
        if (s == 0) {
          plan.add(i, j, w * part[i]);
        } else {
          plan.add(j, i, w * part[i]);
        }
      }
    }
    Measure got = marginal(plan, s);
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      Rational deficit = inst.side(s).weight(i) - got[i];
      if (deficit < 0) throw std::invalid_argument("allocation overuses " + label(inst, s, i));
      if (deficit == 0) continue;
      for (const auto& [j, prob] : fallback_row(inst, s, i, fallback)) {
        std::size_t x = s == 0 ? i : j;
        std::size_t y = s == 0 ? j : i;
        plan.add(x, y, deficit * prob);
        fallbacks[s]->add(x, y, deficit * prob);
      }
    }
  }
  return out;
}

StructureReport structure_audit(const Allocation& a, const Price& p) {
  if (!a.instance) throw std::invalid_argument("allocation has no instance");
  const Instance& inst = *a.instance;
  ExtractedPair pair = extract_pair(a);
  StructureReport report;
  auto fail = [&](bool StructureReport::*flag, std::string what) {
    report.*flag = false;
    report.failures.push_back(std::move(what));
  };

  // Realized densities: mass each agent obtains from its neighborhood.
  std::array<std::vector<Rational>, 2> rho;
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      rho[s].push_back(mass_on(a.bundle[s][i].part(1 - s), inst.neighbors(s, i)));
    }
  }

  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < inst.side(s).size(); ++i) {
      if (inst.side(s).weight(i) == 0) continue;
      for (std::size_t j : inst.neighbors(s, i)) {
        if (p.value[1 - s][j] == 0) {
          fail(&StructureReport::positive_price, label(inst, s, i) + " neighbors the zero-price atom " + label(inst, 1 - s, j));
        }
      }
    }
  }
  for (const auto& e : inst.edges()) {
    if (inst.side(0).weight(e.x) == 0 || inst.side(1).weight(e.y) == 0) continue;
    if (p.value[0][e.x] == 0 || p.value[1][e.y] == 0) continue;
    if (rho[0][e.x] * rho[1][e.y] < 1) {
      fail(&StructureReport::positive_price, "density product below 1 on " + edge_label(inst, e.x, e.y));
    }
  }

  const Plan* fallbacks[2] = {&pair.fallback0, &pair.fallback1};
  for (int s = 0; s < 2; ++s) {
    for (const auto& [k, m] : fallbacks[s]->entries()) {
      std::size_t src = s == 0 ? k.first : k.second;
      std::size_t dst = s == 0 ? k.second : k.first;
      if (inst.side(s).weight(src) > 0 && p.value[s][src] != 0) {
        fail(&StructureReport::fallback_singular, "fallback leaves the positive-price atom " + label(inst, s, src));
      }
      if (inst.side(1 - s).weight(dst) > 0) {
        fail(&StructureReport::fallback_singular, "fallback lands on the positive-weight atom " + label(inst, 1 - s, dst));
      }
    }
  }

  const Plan* plans[2] = {&pair.pi0, &pair.pi1};
  for (int s = 0; s < 2; ++s) {
    for (const auto& [k, m] : plans[s]->entries()) {
      if (m == fallbacks[s]->mass(k.first, k.second)) continue;  // nothing traded here
      if (rho[0][k.first] * rho[1][k.second] != 1) {
        fail(&StructureReport::reciprocal, "density product " + to_string(rho[0][k.first] * rho[1][k.second]) +
                                               " on traded edge " + edge_label(inst, k.first, k.second));
      }
    }
  }
  return report;
}

}  // namespace refinet
