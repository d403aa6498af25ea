#include "refinet/maximin.hpp"

#include "refinet/lp_reference.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace refinet {

namespace {

void require_refinement(const Plan& plan) {
  if (!is_refinement(plan)) throw std::invalid_argument("plan is not a refinement");
}

std::size_t opp_index(const Plan& plan, const EdgeKey& k) { return plan.source_side() == 0 ? k.second : k.first; }

EdgeKey key_of(int side, std::size_t src, std::size_t opp) { return side == 0 ? EdgeKey{src, opp} : EdgeKey{opp, src}; }

}  // namespace

OverflowProfile overflow_profile(const Plan& plan) {
  require_refinement(plan);
  Measure nu = plan.instance().reference(plan.opposite_side());
  LebesgueSplit split = lebesgue_decompose(payload(plan), nu);
  std::map<Rational, Rational> weights;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (split.density[j]) weights[*split.density[j]] += nu[j];
  }
  return OverflowProfile(split.singular.total(), std::move(weights));
}

OverflowSplit overflow_decompose(const Plan& plan, const Rational& t) {
  require_refinement(plan);
  if (t < 0) throw std::invalid_argument("level must be nonnegative");
  Measure nu = plan.instance().reference(plan.opposite_side());
  LebesgueSplit split = lebesgue_decompose(payload(plan), nu);
  std::vector<Rational> scale(nu.size(), Rational(0));
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (split.density[j] && *split.density[j] > 0) scale[j] = rmin(*split.density[j], t) / *split.density[j];
  }
  OverflowSplit out{Plan(plan.instance_ptr(), plan.source_side()), Plan(plan.instance_ptr(), plan.source_side())};
  for (const auto& [k, mass] : plan.entries()) {
    Rational kept = mass * scale[opp_index(plan, k)];
    out.sigma.add(k.first, k.second, kept);
    out.overflow.add(k.first, k.second, mass - kept);
  }
  return out;
}

std::vector<Rational> target_density(const Instance& instance, int side, const PiecewiseLinear& fit) {
  const AtomSpace& opp = instance.side(1 - side);
  std::vector<Rational> density(opp.size(), Rational(0));
  // Segments run in increasing t; the last one whose active neighborhood still holds y wins.
  for (const auto& seg : fit.segments) {
    if (!seg.end) continue;
    for (std::size_t j : neighborhood(instance, side, complement(instance, side, seg.cut))) {
      if (opp.weight(j) > 0) density[j] = *seg.end;
    }
  }
  return density;
}

namespace {

Plan realize(const InstancePtr& instance, int side, const std::vector<Rational>& density, const LomOptions& options) {
  const Instance& inst = *instance;
  const AtomSpace& src = inst.side(side);
  const AtomSpace& opp = inst.side(1 - side);
  std::size_t n = src.size();
  std::size_t m = opp.size();
  std::size_t s = 0;
  std::size_t sink = n + m + 1;

  FlowNetwork net(n + m + 2);
  for (std::size_t i = 0; i < n; ++i) net.add_arc(s, 1 + i, src.weight(i));
  struct Link {
    std::size_t src, opp, arc;
  };
  std::vector<Link> links;
  auto add_link = [&](std::size_t i, std::size_t j) { links.push_back({i, j, net.add_arc(1 + i, 1 + n + j, std::nullopt)}); };
  if (options.reverse_arcs) {
    for (std::size_t i = n; i-- > 0;) {
      const auto& nb = inst.neighbors(side, i);
      for (auto it = nb.rbegin(); it != nb.rend(); ++it) add_link(i, *it);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j : inst.neighbors(side, i)) add_link(i, j);
  }
  std::vector<std::size_t> sink_arcs;
  for (std::size_t j = 0; j < m; ++j) sink_arcs.push_back(net.add_arc(1 + n + j, sink, Rational(density[j] * opp.weight(j))));
  net.solve(s, sink);

  auto collect = [&] {
    Plan plan(instance, side);
    for (const Link& l : links) {
      auto [x, y] = key_of(side, l.src, l.opp);
      plan.add(x, y, net.flow(l.arc));
    }
    return plan;
  };
  Plan plan = collect();

  // Leftover source mass goes to null atoms; directly by policy when every such source has one.
  Measure sent = marginal(plan, side);
  bool direct = true;
  for (std::size_t i = 0; i < n && direct; ++i) {
    if (sent[i] == src.weight(i)) continue;
    const auto& nb = inst.neighbors(side, i);
    direct = std::any_of(nb.begin(), nb.end(), [&](std::size_t j) { return opp.weight(j) == 0; });
  }
  if (direct) {
    for (std::size_t i = 0; i < n; ++i) {
      Rational rest = src.weight(i) - sent[i];
      if (rest == 0) continue;
      std::vector<std::size_t> null_nb;
      for (std::size_t j : inst.neighbors(side, i))
        if (opp.weight(j) == 0) null_nb.push_back(j);
      if (options.placement == SingularPlacement::LowestIndex) null_nb.resize(1);
      Rational share = rest / Rational(null_nb.size());
      for (std::size_t j : null_nb) {
        auto [x, y] = key_of(side, i, j);
        plan.add(x, y, share);
      }
    }
    return plan;
  }
  // Otherwise reroute: open the null sinks and keep augmenting; sink flows never decrease.
  for (std::size_t j = 0; j < m; ++j)
    if (opp.weight(j) == 0) net.set_capacity(sink_arcs[j], std::nullopt);
  net.solve(s, sink);
  return collect();
}

}  // namespace

Plan solve_lom(const InstancePtr& instance, int side, const LomOptions& options) {
  if (side != 0 && side != 1) throw std::invalid_argument("side must be 0 or 1");
  PiecewiseLinear f = fit_breakpoints(instance, side);
  Plan plan = realize(instance, side, target_density(*instance, side, f), options);
  if (is_refinement(plan) && verify_lom(plan).verdict) return plan;

  OracleResult fallback = min_divergence_oracle(instance, side, exp_neg_integrand(), 1e-13);
  if (is_refinement(fallback.plan) && verify_lom(fallback.plan).verdict) return fallback.plan;
  throw std::runtime_error("could not certify a level-optimal maximin refinement");
}

LomCertificate verify_lom(const Plan& plan) {
  require_refinement(plan);
  int side = plan.source_side();
  PiecewiseLinear f = fit_breakpoints(plan.instance_ptr(), side);
  OverflowProfile over = overflow_profile(plan);

  std::set<Rational> points{Rational(0)};
  for (const auto& r : over.breakpoints()) points.insert(r);
  for (const auto& t : f.breakpoints()) points.insert(t);
  points.insert(*points.rbegin() + 1);

  std::vector<std::pair<Rational, bool>> levels;
  for (auto it = points.begin(); it != points.end(); ++it) {
    levels.emplace_back(*it, false);
    auto next = std::next(it);
    if (next != points.end()) levels.emplace_back((*it + *next) / 2, true);
  }

  LomCertificate cert;
  Rational total = plan.total();
  std::optional<Rational> first_mid;
  for (const auto& [t, mid] : levels) {
    // Truncated mass = total - Over(t).
    LevelCheck check{t, Rational(total - over(t)), f.evaluate(t), mid};
    if (check.truncated != check.fit) {
      cert.verdict = false;
      cert.failures.push_back(t);
      if (!mid && !cert.first_failure) cert.first_failure = t;
      if (mid && !first_mid) first_mid = t;
    }
    cert.levels.push_back(std::move(check));
  }
  if (!cert.first_failure) cert.first_failure = first_mid;
  return cert;
}

bool unique_ac_audit(const Plan& a, const Plan& b) {
  if (a.instance_ptr() != b.instance_ptr() && !(a.instance().side(0) == b.instance().side(0) &&
                                                 a.instance().side(1) == b.instance().side(1))) {
    throw std::invalid_argument("plans live on different instances");
  }
  if (a.source_side() != b.source_side()) throw std::invalid_argument("plans have different source sides");
  Measure nu_a = a.instance().reference(a.opposite_side());
  Measure nu_b = b.instance().reference(b.opposite_side());
  Measure ac_a = lebesgue_decompose(payload(a), nu_a).absolutely_continuous(nu_a);
  Measure ac_b = lebesgue_decompose(payload(b), nu_b).absolutely_continuous(nu_b);
  return ac_a.values() == ac_b.values();
}

bool pointwise_local_maximin_check(const Plan& plan) {
  require_refinement(plan);
  const Instance& inst = plan.instance();
  int side = plan.source_side();
  const AtomSpace& src = inst.side(side);
  Measure nu = inst.reference(1 - side);
  Measure load = payload(plan);

  // Extended density; nullopt stands for +inf, and unmarked null atoms are excluded.
  std::vector<std::optional<Rational>> rho(nu.size());
  std::vector<bool> counted(nu.size(), false);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (nu[j] > 0) {
      rho[j] = load[j] / nu[j];
      counted[j] = true;
    } else if (load[j] > 0) {
      counted[j] = true;
    }
  }
  auto less = [](const std::optional<Rational>& a, const std::optional<Rational>& b) {
    if (!a) return false;
    return !b || *a < *b;
  };

  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src.weight(i) == 0) continue;
    // Benchmark support: nu restricted to N(x) plus the kernel row of x.
    std::vector<std::size_t> support;
    for (std::size_t j : inst.neighbors(side, i)) {
      auto [x, y] = key_of(side, i, j);
      if ((nu[j] > 0 || plan.mass(x, y) > 0) && counted[j]) support.push_back(j);
    }
    if (support.empty()) continue;
    std::optional<Rational> best = rho[support.front()];
    for (std::size_t j : support)
      if (less(rho[j], best)) best = rho[j];
    for (std::size_t j : inst.neighbors(side, i)) {
      auto [x, y] = key_of(side, i, j);
      if (plan.mass(x, y) > 0 && rho[j] != best) return false;
    }
  }
  return true;
}

std::vector<WeaknessCase> weakness_experiment() {
  std::vector<WeaknessCase> out;
  {
    auto inst = std::make_shared<const Instance>(AtomSpace({{"x1", 1}}), AtomSpace({{"y1", 1}, {"y0", 0}}),
                                                 std::vector<std::pair<std::string, std::string>>{{"x1", "y1"}, {"x1", "y0"}});
    Plan plan(inst, 0, {{{0, 1}, Rational(1)}});
    out.push_back({"null-escape",
                   "x1 adjacent to y1 (weight 1) and y0 (weight 0); all mass sent to y0",
                   pointwise_local_maximin_check(plan), verify_lom(plan).verdict});
  }
  {
    auto inst = std::make_shared<const Instance>(AtomSpace({{"x1", 1}, {"x2", 0}}), AtomSpace({{"y1", 1}, {"y0", 0}}),
                                                 std::vector<std::pair<std::string, std::string>>{{"x1", "y0"}, {"x2", "y1"}});
    Plan plan(inst, 0, {{{0, 1}, Rational(1)}});
    out.push_back({"detached",
                   "x1 adjacent to y0 (weight 0) only; y1 reachable only from the null atom x2",
                   pointwise_local_maximin_check(plan), verify_lom(plan).verdict});
  }
  return out;
}

}  // namespace refinet
