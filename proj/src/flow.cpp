#include "refinet/flow.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace refinet {

FlowNetwork::FlowNetwork(std::size_t nodes) : out_(nodes) {}

std::size_t FlowNetwork::add_arc(std::size_t from, std::size_t to, std::optional<Rational> capacity) {
  if (from >= out_.size() || to >= out_.size()) throw std::out_of_range("arc endpoint out of range");
  if (capacity && *capacity < 0) throw std::invalid_argument("negative capacity");
  std::size_t id = arcs_.size() / 2;
  out_[from].push_back(arcs_.size());
  arcs_.push_back(Arc{to, std::move(capacity)});
  out_[to].push_back(arcs_.size());
  arcs_.push_back(Arc{from, Rational(0)});
  return id;
}

void FlowNetwork::set_capacity(std::size_t arc, std::optional<Rational> capacity) {
  Arc& a = arcs_.at(2 * arc);
  if (capacity && *capacity < a.flow) throw std::invalid_argument("capacity below current flow");
  a.capacity = std::move(capacity);
}

Rational FlowNetwork::solve(std::size_t source, std::size_t sink) {
  // Reverse arcs store residual capacity as capacity = forward flow, kept in sync below.
  Rational total = 0;
  const std::size_t none = static_cast<std::size_t>(-1);
  for (;;) {
    std::vector<std::size_t> via(out_.size(), none);
    std::vector<bool> seen(out_.size(), false);
    std::deque<std::size_t> queue{source};
    seen[source] = true;
    while (!queue.empty() && !seen[sink]) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t k : out_[u]) {
        const Arc& a = arcs_[k];
        if (seen[a.to] || !has_residual(a)) continue;
        seen[a.to] = true;
        via[a.to] = k;
        queue.push_back(a.to);
      }
    }
    if (!seen[sink]) break;

    std::optional<Rational> push;
    for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
      const Arc& a = arcs_[via[v]];
      if (!a.capacity) continue;
      Rational room = *a.capacity - a.flow;
      if (!push || room < *push) push = room;
    }
    if (!push) throw std::logic_error("unbounded augmenting path");
    for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
      std::size_t k = via[v];
      if (k % 2 == 0) {
        arcs_[k].flow += *push;
        arcs_[k + 1].capacity = arcs_[k].flow;
        arcs_[k + 1].flow = 0;
      } else {
        arcs_[k - 1].flow -= *push;
        arcs_[k].capacity = arcs_[k - 1].flow;
        arcs_[k].flow = 0;
      }
    }
    total += *push;
  }
  return total;
}

std::vector<bool> FlowNetwork::residual_reachable(std::size_t source) const {
  std::vector<bool> seen(out_.size(), false);
  std::deque<std::size_t> queue{source};
  seen[source] = true;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t k : out_[u]) {
      const Arc& a = arcs_[k];
      if (seen[a.to] || !has_residual(a)) continue;
      seen[a.to] = true;
      queue.push_back(a.to);
    }
  }
  return seen;
}

namespace {

EdgeKey key_for(int side, std::size_t src, std::size_t opp) {
  return side == 0 ? EdgeKey{src, opp} : EdgeKey{opp, src};
}

void check_side(int side) {
  if (side != 0 && side != 1) throw std::invalid_argument("side must be 0 or 1");
}

}  // namespace

FlowResult max_feasible_mass(const InstancePtr& instance, int side, const Measure& a, const Measure& b,
                             const FlowOptions& options) {
  check_side(side);
  const Instance& inst = *instance;
  if (!same_space(a.space_ptr(), inst.side_ptr(side)) || !same_space(b.space_ptr(), inst.side_ptr(1 - side))) {
    throw std::invalid_argument("capacity measures live on the wrong sides");
  }
  std::size_t n = inst.side(side).size();
  std::size_t m = inst.side(1 - side).size();
  std::size_t s = 0;
  std::size_t sink = n + m + 1;
  FlowNetwork net(n + m + 2);
  for (std::size_t i = 0; i < n; ++i) net.add_arc(s, 1 + i, a[i]);

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
  for (std::size_t j = 0; j < m; ++j) net.add_arc(1 + n + j, sink, b[j]);

  Rational value = net.solve(s, sink);
  Plan plan(instance, side);
  for (const Link& l : links) {
    const Rational& f = net.flow(l.arc);
    if (f > 0) {
      auto [x, y] = key_for(side, l.src, l.opp);
      plan.add(x, y, f);
    }
  }
  std::vector<bool> reach = net.residual_reachable(s);
  std::vector<std::size_t> cut;
  for (std::size_t i = 0; i < n; ++i)
    if (!reach[1 + i]) cut.push_back(i);
  return FlowResult{std::move(plan), std::move(value), std::move(cut)};
}

std::vector<std::size_t> neighborhood(const Instance& instance, int side, const std::vector<std::size_t>& atoms) {
  std::vector<bool> hit(instance.side(1 - side).size(), false);
  for (std::size_t i : atoms)
    for (std::size_t j : instance.neighbors(side, i)) hit[j] = true;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < hit.size(); ++j)
    if (hit[j]) out.push_back(j);
  return out;
}

std::vector<std::size_t> complement(const Instance& instance, int side, const std::vector<std::size_t>& atoms) {
  std::vector<bool> in(instance.side(side).size(), false);
  for (std::size_t i : atoms) in.at(i) = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

Rational cut_value(const Instance& instance, int side, const Measure& a, const Measure& b,
                   const std::vector<std::size_t>& cut) {
  Rational value = 0;
  for (std::size_t i : cut) value += a[i];
  for (std::size_t j : neighborhood(instance, side, complement(instance, side, cut))) value += b[j];
  return value;
}

Rational fit(const InstancePtr& instance, int side, const Rational& t) {
  check_side(side);
  if (t < 0) throw std::invalid_argument("level must be nonnegative");
  const Instance& inst = *instance;
  return max_feasible_mass(instance, side, inst.reference(side), inst.reference(1 - side).scaled(t)).value;
}

Rational PiecewiseLinear::evaluate(const Rational& t) const {
  if (t < 0) throw std::invalid_argument("level must be nonnegative");
  for (const auto& seg : segments) {
    if (!seg.end || t <= *seg.end) return seg.intercept + seg.slope * t;
  }
  throw std::logic_error("piecewise-linear function has no final segment");
}

std::vector<Rational> PiecewiseLinear::breakpoints() const {
  std::vector<Rational> out;
  for (const auto& seg : segments)
    if (seg.end) out.push_back(*seg.end);
  return out;
}

namespace {

struct Line {
  Rational intercept;
  Rational slope;
  std::vector<std::size_t> cut;
  Rational at(const Rational& t) const { return intercept + slope * t; }
};

class BreakpointSearch {
 public:
  BreakpointSearch(const InstancePtr& instance, int side)
      : instance_(instance), side_(side), nu_src_(instance->reference(side)), nu_opp_(instance->reference(1 - side)) {}

  Line probe(const Rational& t) const {
    FlowResult r = max_feasible_mass(instance_, side_, nu_src_, nu_opp_.scaled(t));
    Line line;
    for (std::size_t i : r.cut) line.intercept += nu_src_[i];
    for (std::size_t j : neighborhood(*instance_, side_, complement(*instance_, side_, r.cut))) line.slope += nu_opp_[j];
    line.cut = std::move(r.cut);
    if (line.at(t) != r.value) throw std::logic_error("min-cut certificate does not match flow value");
    return line;
  }

  // Appends the lines strictly after `lo` up to and including `hi`, with the crossing points between them.
  void refine(const Line& lo, const Line& hi, std::vector<Line>& lines, std::vector<Rational>& crossings) const {
    if (lo.slope == hi.slope) return;  // same line on the whole interval
    Rational t = (hi.intercept - lo.intercept) / (lo.slope - hi.slope);
    Line mid = probe(t);
    if (mid.at(t) == lo.at(t)) {
      crossings.push_back(t);
      lines.push_back(hi);
      return;
    }
    refine(lo, mid, lines, crossings);
    refine(mid, hi, lines, crossings);
  }

 private:
  InstancePtr instance_;
  int side_;
  Measure nu_src_;
  Measure nu_opp_;
};

}  // namespace

PiecewiseLinear fit_breakpoints(const InstancePtr& instance, int side) {
  check_side(side);
  const Instance& inst = *instance;
  Rational top = 1;
  if (auto w = inst.side(1 - side).min_positive_weight()) top = inst.side(side).total() / *w + 1;

  BreakpointSearch search(instance, side);
  Line first = search.probe(Rational(0));
  Line last = search.probe(top);
  if (last.slope != 0) throw std::logic_error("Fit is not constant beyond the search horizon");

  std::vector<Line> lines{first};
  std::vector<Rational> crossings;
  search.refine(first, last, lines, crossings);

  PiecewiseLinear out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    PiecewiseLinear::Segment seg;
    seg.start = k == 0 ? Rational(0) : crossings[k - 1];
    if (k < crossings.size()) seg.end = crossings[k];
    seg.intercept = lines[k].intercept;
    seg.slope = lines[k].slope;
    seg.cut = lines[k].cut;
    out.segments.push_back(std::move(seg));
  }
  out.fit_infinity = out.segments.back().intercept;
  return out;
}

AugmentingSubplan augmenting_subplan(const Plan& sigma, const Plan& sigma0, const Measure& b) {
  if (sigma.instance_ptr() != sigma0.instance_ptr() || sigma.source_side() != sigma0.source_side()) {
    throw std::invalid_argument("subplans must share instance and source side");
  }
  const Instance& inst = sigma.instance();
  int side = sigma.source_side();
  if (!same_space(b.space_ptr(), inst.side_ptr(1 - side))) throw std::invalid_argument("capacity on the wrong side");
  Measure xi = marginal(sigma, side);
  Measure xi0 = marginal(sigma0, side);
  Measure psi = marginal(sigma, 1 - side);
  Measure psi0 = marginal(sigma0, 1 - side);
  if (!psi.dominated_by(b) || !psi0.dominated_by(b)) throw std::invalid_argument("opposite marginal exceeds capacity");
  if (sigma.total() <= sigma0.total()) throw std::invalid_argument("sigma must carry more mass than sigma0");
  if (!sigma.on_edges() || !sigma0.on_edges()) throw std::invalid_argument("subplans must live on edges");

  std::size_t n = inst.side(side).size();
  std::size_t m = inst.side(1 - side).size();
  std::size_t s = 0;
  std::size_t sink = n + m + 1;
  auto src_of = [side](const EdgeKey& k) { return side == 0 ? k.first : k.second; };
  auto opp_of = [side](const EdgeKey& k) { return side == 0 ? k.second : k.first; };

  FlowNetwork net(n + m + 2);
  for (std::size_t i = 0; i < n; ++i) net.add_arc(s, 1 + i, positive_part(xi[i] - xi0[i]));
  std::vector<std::pair<EdgeKey, std::size_t>> forward, backward;
  for (const auto& [k, mass] : sigma.entries()) forward.emplace_back(k, net.add_arc(1 + src_of(k), 1 + n + opp_of(k), mass));
  for (const auto& [k, mass] : sigma0.entries()) backward.emplace_back(k, net.add_arc(1 + n + opp_of(k), 1 + src_of(k), mass));
  for (std::size_t j = 0; j < m; ++j) net.add_arc(1 + n + j, sink, Rational(b[j] - psi0[j]));

  Rational value = net.solve(s, sink);
  if (value < sigma.total() - sigma0.total()) throw std::logic_error("augmenting network carries less than the mass gap");

  AugmentingSubplan out{Plan(sigma.instance_ptr(), side), Plan(sigma.instance_ptr(), side)};
  for (const auto& [k, arc] : forward) out.gamma.add(k.first, k.second, net.flow(arc));
  for (const auto& [k, arc] : backward) out.gamma0.add(k.first, k.second, net.flow(arc));
  return out;
}

}  // namespace refinet
