#pragma once

// Named small instances and a seeded random instance generator shared by the test binaries.

#include "refinet/measure.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using refinet::AtomSpace;
using refinet::Instance;
using refinet::InstancePtr;
using refinet::Plan;
using refinet::Rational;
using Pairs = std::vector<std::pair<std::string, std::string>>;

inline InstancePtr make(AtomSpace a, AtomSpace b, const Pairs& edges) {
  return std::make_shared<const Instance>(std::move(a), std::move(b), edges);
}

// 2x2 complete relation, unit weights.
inline InstancePtr i1() {
  return make(AtomSpace({{"x1", 1}, {"x2", 1}}), AtomSpace({{"y1", 1}, {"y2", 1}}),
              {{"x1", "y1"}, {"x1", "y2"}, {"x2", "y1"}, {"x2", "y2"}});
}

// Path x1 - y1 - x2 - y2, unit weights.
inline InstancePtr i2() {
  return make(AtomSpace({{"x1", 1}, {"x2", 1}}), AtomSpace({{"y1", 1}, {"y2", 1}}),
              {{"x1", "y1"}, {"x2", "y1"}, {"x2", "y2"}});
}

// One source of weight 2 facing y1 (weight 1) and the null atom y2.
inline InstancePtr i3() {
  return make(AtomSpace({{"x1", 2}}), AtomSpace({{"y1", 1}, {"y2", 0}}), {{"x1", "y1"}, {"x1", "y2"}});
}

// x1 only reaches the null atom y2; y1 is only reachable from the null atom x2.
inline InstancePtr i4() {
  return make(AtomSpace({{"x1", 1}, {"x2", 0}}), AtomSpace({{"y1", 1}, {"y2", 0}}), {{"x1", "y2"}, {"x2", "y1"}});
}

inline Rational q(long p, long d = 1) { return Rational(p) / Rational(d); }

inline Plan plan(const InstancePtr& inst, int side, const std::vector<std::pair<std::pair<std::string, std::string>, Rational>>& e) {
  Plan out(inst, side);
  for (const auto& [ids, mass] : e) out.add(inst->side(0).index_of(ids.first), inst->side(1).index_of(ids.second), mass);
  return out;
}

inline Plan pi_identity(const InstancePtr& inst) { return plan(inst, 0, {{{"x1", "y1"}, 1}, {{"x2", "y2"}, 1}}); }

// The 2x2 plan [[1/4, 3/4], [3/4, 1/4]] viewed from side 1.
inline Plan pi_cross(const InstancePtr& inst) {
  return plan(inst, 1, {{{"x1", "y1"}, q(1, 4)}, {{"x1", "y2"}, q(3, 4)}, {{"x2", "y1"}, q(3, 4)}, {{"x2", "y2"}, q(1, 4)}});
}

struct RandomSpec {
  int max_atoms = 6;
  int max_edges = 20;
  int max_den = 16;
  double zero_weight_chance = 0.15;
};

// Random valid instance: every positive atom has an edge and each side has a positive atom.
inline InstancePtr random_instance(std::uint64_t seed, const RandomSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

  int n0 = uniform(1, spec.max_atoms);
  int n1 = uniform(1, spec.max_atoms);
  auto weights = [&](int n) {
    std::vector<Rational> w(n);
    bool any = false;
    for (auto& v : w) {
      if (chance(spec.zero_weight_chance)) {
        v = 0;
      } else {
        v = Rational(uniform(1, 3 * spec.max_den)) / Rational(uniform(1, spec.max_den));
        any = true;
      }
    }
    if (!any) w[uniform(0, n - 1)] = Rational(uniform(1, spec.max_den)) / Rational(uniform(1, spec.max_den));
    return w;
  };
  std::vector<Rational> w0 = weights(n0);
  std::vector<Rational> w1 = weights(n1);

  std::vector<std::vector<bool>> adj(n0, std::vector<bool>(n1, false));
  int edges = 0;
  auto link = [&](int x, int y) {
    if (!adj[x][y]) {
      adj[x][y] = true;
      ++edges;
    }
  };
  for (int x = 0; x < n0; ++x)
    if (w0[x] > 0) link(x, uniform(0, n1 - 1));
  for (int y = 0; y < n1; ++y) {
    bool has = false;
    for (int x = 0; x < n0; ++x) has = has || adj[x][y];
    if (w1[y] > 0 && !has) link(uniform(0, n0 - 1), y);
  }
  int extra = uniform(0, n0 * n1);
  for (int k = 0; k < extra && edges < spec.max_edges; ++k) link(uniform(0, n0 - 1), uniform(0, n1 - 1));

  std::vector<refinet::Atom> a0, a1;
  for (int x = 0; x < n0; ++x) a0.push_back({"x" + std::to_string(x + 1), w0[x]});
  for (int y = 0; y < n1; ++y) a1.push_back({"y" + std::to_string(y + 1), w1[y]});
  Pairs pairs;
  for (int x = 0; x < n0; ++x)
    for (int y = 0; y < n1; ++y)
      if (adj[x][y]) pairs.emplace_back(a0[x].id, a1[y].id);
  return make(AtomSpace(a0), AtomSpace(a1), pairs);
}

}  // namespace fixtures
