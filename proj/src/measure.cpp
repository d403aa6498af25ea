#include "refinet/measure.hpp"

#include <algorithm>
#include <stdexcept>

namespace refinet {

AtomSpace::AtomSpace(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("atom space must contain at least one atom");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].weight < 0) throw std::invalid_argument("negative weight on atom '" + atoms_[i].id + "'");
    if (!index_.emplace(atoms_[i].id, i).second) {
      throw std::invalid_argument("duplicate atom id '" + atoms_[i].id + "'");
    }
  }
}

std::optional<std::size_t> AtomSpace::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AtomSpace::index_of(std::string_view id) const {
  auto i = find(id);
  if (!i) throw std::invalid_argument("unknown atom id '" + std::string(id) + "'");
  return *i;
}

Rational AtomSpace::total() const {
  Rational sum = 0;
  for (const auto& a : atoms_) sum += a.weight;
  return sum;
}

std::optional<Rational> AtomSpace::min_positive_weight() const {
  std::optional<Rational> best;
  for (const auto& a : atoms_) {
    if (a.weight > 0 && (!best || a.weight < *best)) best = a.weight;
  }
  return best;
}

bool operator==(const AtomSpace& a, const AtomSpace& b) {
  if (a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (a.atoms_[i].id != b.atoms_[i].id || a.atoms_[i].weight != b.atoms_[i].weight) return false;
  }
  return true;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

Measure::Measure(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("measure needs a space");
  mass_.assign(space_->size(), Rational(0));
}

Measure::Measure(SpacePtr space, std::vector<Rational> mass) : space_(std::move(space)), mass_(std::move(mass)) {
  if (!space_) throw std::invalid_argument("measure needs a space");
  if (mass_.size() != space_->size()) throw std::invalid_argument("measure size does not match its space");
  for (const auto& m : mass_) {
    if (m < 0) throw std::invalid_argument("measure mass must be nonnegative");
  }
}

Measure Measure::reference(SpacePtr space) {
  std::vector<Rational> w;
  w.reserve(space->size());
  for (const auto& a : space->atoms()) w.push_back(a.weight);
  return Measure(std::move(space), std::move(w));
}

void Measure::set(std::size_t i, Rational value) {
  if (value < 0) throw std::invalid_argument("measure mass must be nonnegative");
  mass_.at(i) = std::move(value);
}

void Measure::add(std::size_t i, const Rational& value) {
  Rational v = mass_.at(i) + value;
  if (v < 0) throw std::invalid_argument("measure mass must be nonnegative");
  mass_[i] = std::move(v);
}

Rational Measure::total() const {
  Rational sum = 0;
  for (const auto& m : mass_) sum += m;
  return sum;
}

Measure Measure::scaled(const Rational& factor) const {
  if (factor < 0) throw std::invalid_argument("negative scale factor");
  Measure out(space_);
  for (std::size_t i = 0; i < mass_.size(); ++i) out.mass_[i] = mass_[i] * factor;
  return out;
}

Measure Measure::operator+(const Measure& other) const {
  if (!same_space(space_, other.space_)) throw std::invalid_argument("space mismatch");
  Measure out(space_);
  for (std::size_t i = 0; i < mass_.size(); ++i) out.mass_[i] = mass_[i] + other.mass_[i];
  return out;
}

bool Measure::dominated_by(const Measure& other) const {
  if (!same_space(space_, other.space_)) throw std::invalid_argument("space mismatch");
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] > other.mass_[i]) return false;
  }
  return true;
}

bool operator==(const Measure& a, const Measure& b) {
  return same_space(a.space_, b.space_) && a.mass_ == b.mass_;
}

Instance::Instance(SpacePtr side0, SpacePtr side1, std::vector<Edge> edges)
    : sides_{std::move(side0), std::move(side1)}, edges_(std::move(edges)) {
  build();
}

Instance::Instance(AtomSpace side0, AtomSpace side1, const std::vector<std::pair<std::string, std::string>>& edges)
    : sides_{std::make_shared<const AtomSpace>(std::move(side0)), std::make_shared<const AtomSpace>(std::move(side1))} {
  edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) edges_.push_back(Edge{sides_[0]->index_of(a), sides_[1]->index_of(b)});
  build();
}

void Instance::build() {
  if (!sides_[0] || !sides_[1]) throw std::invalid_argument("instance needs two atom spaces");
  for (const auto& e : edges_) {
    if (e.x >= sides_[0]->size() || e.y >= sides_[1]->size()) {
      throw std::invalid_argument("edge endpoint out of range");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw std::invalid_argument("duplicate edge");
  }
  adjacency_[0].assign(sides_[0]->size(), {});
  adjacency_[1].assign(sides_[1]->size(), {});
  for (const auto& e : edges_) {
    adjacency_[0][e.x].push_back(e.y);
    adjacency_[1][e.y].push_back(e.x);
  }
  for (int s = 0; s < 2; ++s) {
    for (std::size_t i = 0; i < sides_[s]->size(); ++i) {
      std::sort(adjacency_[s][i].begin(), adjacency_[s][i].end());
      if (adjacency_[s][i].empty() && sides_[s]->weight(i) > 0) {
        throw std::invalid_argument("atom '" + sides_[s]->id(i) + "' on side " + std::to_string(s) +
                                    " has positive weight but no incident edge");
      }
    }
  }
}

bool Instance::has_edge(std::size_t x, std::size_t y) const { return edge_index(x, y).has_value(); }

std::optional<std::size_t> Instance::edge_index(std::size_t x, std::size_t y) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{x, y});
  if (it == edges_.end() || !(*it == Edge{x, y})) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

Plan::Plan(InstancePtr instance, int source_side) : instance_(std::move(instance)), source_side_(source_side) {
  if (!instance_) throw std::invalid_argument("plan needs an instance");
  if (source_side_ != 0 && source_side_ != 1) throw std::invalid_argument("source side must be 0 or 1");
}

Plan::Plan(InstancePtr instance, int source_side, const std::map<EdgeKey, Rational>& entries)
    : Plan(std::move(instance), source_side) {
  for (const auto& [key, value] : entries) add(key.first, key.second, value);
}

Rational Plan::mass(std::size_t x, std::size_t y) const {
  auto it = entries_.find({x, y});
  return it == entries_.end() ? Rational(0) : it->second;
}

void Plan::add(std::size_t x, std::size_t y, const Rational& value) {
  if (x >= instance_->side(0).size() || y >= instance_->side(1).size()) {
    throw std::invalid_argument("plan entry index out of range");
  }
  Rational v = mass(x, y) + value;
  if (v < 0) throw std::invalid_argument("plan mass must be nonnegative");
  if (v == 0) {
    entries_.erase({x, y});
  } else {
    entries_[{x, y}] = std::move(v);
  }
}

Rational Plan::total() const {
  Rational sum = 0;
  for (const auto& [k, v] : entries_) sum += v;
  return sum;
}

bool Plan::on_edges() const {
  for (const auto& [k, v] : entries_) {
    if (!instance_->has_edge(k.first, k.second)) return false;
  }
  return true;
}

Plan Plan::scaled(const Rational& factor) const {
  if (factor < 0) throw std::invalid_argument("negative scale factor");
  Plan out(instance_, source_side_);
  if (factor == 0) return out;
  for (const auto& [k, v] : entries_) out.entries_[k] = v * factor;
  return out;
}

Plan Plan::operator+(const Plan& other) const {
  Plan out = *this;
  for (const auto& [k, v] : other.entries_) out.add(k.first, k.second, v);
  return out;
}

bool Plan::dominated_by(const Plan& other) const {
  for (const auto& [k, v] : entries_) {
    if (v > other.mass(k.first, k.second)) return false;
  }
  return true;
}

bool operator==(const Plan& a, const Plan& b) {
  return a.source_side_ == b.source_side_ && a.entries_ == b.entries_;
}

Measure LebesgueSplit::absolutely_continuous(const Measure& nu) const {
  Measure out(nu.space_ptr());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (density.at(i)) out.set(i, *density[i] * nu[i]);
  }
  return out;
}

Measure marginal(const Plan& plan, int side) {
  if (side != 0 && side != 1) throw std::invalid_argument("side must be 0 or 1");
  Measure out(plan.instance().side_ptr(side));
  for (const auto& [k, v] : plan.entries()) out.add(side == 0 ? k.first : k.second, v);
  return out;
}

LebesgueSplit lebesgue_decompose(const Measure& mu, const Measure& nu) {
  if (!same_space(mu.space_ptr(), nu.space_ptr())) throw std::invalid_argument("space mismatch");
  LebesgueSplit split{std::vector<std::optional<Rational>>(mu.size()), Measure(mu.space_ptr())};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (nu[i] > 0) {
      split.density[i] = mu[i] / nu[i];
    } else {
      split.singular.set(i, mu[i]);
    }
  }
  return split;
}

bool is_refinement(const Plan& plan) {
  if (!plan.on_edges()) return false;
  int s = plan.source_side();
  return marginal(plan, s) == plan.instance().reference(s);
}

Measure truncated_payload(const Plan& plan, const Rational& t) {
  if (t < 0) throw std::invalid_argument("level must be nonnegative");
  int opp = plan.opposite_side();
  Measure nu = plan.instance().reference(opp);
  LebesgueSplit split = lebesgue_decompose(marginal(plan, opp), nu);
  Measure out(nu.space_ptr());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    if (split.density[i]) out.set(i, rmin(*split.density[i], t) * nu[i]);
  }
  return out;
}

}  // namespace refinet
