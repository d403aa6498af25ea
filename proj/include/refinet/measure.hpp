#pragma once

// Finite atom spaces, measures, bipartite instances and refinement plans.

#include "refinet/rational.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace refinet {

struct Atom {
  std::string id;
  Rational weight;
};

// Ordered list of labeled atoms with nonnegative weights. Weight-zero atoms stand
// for null points that may still carry singular mass.
class AtomSpace {
 public:
  explicit AtomSpace(std::vector<Atom> atoms);

  std::size_t size() const { return atoms_.size(); }
  const Atom& atom(std::size_t i) const { return atoms_.at(i); }
  const std::string& id(std::size_t i) const { return atoms_.at(i).id; }
  const Rational& weight(std::size_t i) const { return atoms_.at(i).weight; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  Rational total() const;
  // Smallest strictly positive weight, or nullopt when every weight is 0.
  std::optional<Rational> min_positive_weight() const;

  friend bool operator==(const AtomSpace& a, const AtomSpace& b);

 private:
  std::vector<Atom> atoms_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const AtomSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

// Nonnegative mass on the atoms of one space, stored densely by atom index.
class Measure {
 public:
  explicit Measure(SpacePtr space);
  Measure(SpacePtr space, std::vector<Rational> mass);

  // The space's own weights.
  static Measure reference(SpacePtr space);

  const AtomSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t size() const { return mass_.size(); }
  const Rational& operator[](std::size_t i) const { return mass_.at(i); }
  const std::vector<Rational>& values() const { return mass_; }
  Rational at(std::string_view id) const { return mass_.at(space_->index_of(id)); }

  void set(std::size_t i, Rational value);
  void add(std::size_t i, const Rational& value);

  Rational total() const;
  Measure scaled(const Rational& factor) const;
  Measure operator+(const Measure& other) const;
  // Atomwise a <= b on the same space.
  bool dominated_by(const Measure& other) const;

  friend bool operator==(const Measure& a, const Measure& b);

 private:
  SpacePtr space_;
  std::vector<Rational> mass_;
};

struct Edge {
  std::size_t x;  // index on side 0
  std::size_t y;  // index on side 1
  friend bool operator<(const Edge& a, const Edge& b) { return std::pair(a.x, a.y) < std::pair(b.x, b.y); }
  friend bool operator==(const Edge& a, const Edge& b) { return a.x == b.x && a.y == b.y; }
};

// Two atom spaces and a bipartite relation between them. Every atom of positive
// weight needs at least one incident edge; weight-zero atoms may be isolated.
class Instance {
 public:
  Instance(SpacePtr side0, SpacePtr side1, std::vector<Edge> edges);
  Instance(AtomSpace side0, AtomSpace side1, const std::vector<std::pair<std::string, std::string>>& edges);

  const AtomSpace& side(int s) const { return *sides_.at(s); }
  const SpacePtr& side_ptr(int s) const { return sides_.at(s); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(std::size_t x, std::size_t y) const;
  std::optional<std::size_t> edge_index(std::size_t x, std::size_t y) const;
  // Opposite-side neighbors of atom i on side s, ascending.
  const std::vector<std::size_t>& neighbors(int s, std::size_t i) const { return adjacency_.at(s).at(i); }
  Measure reference(int s) const { return Measure::reference(sides_.at(s)); }

 private:
  void build();

  std::array<SpacePtr, 2> sides_;
  std::vector<Edge> edges_;
  std::array<std::vector<std::vector<std::size_t>>, 2> adjacency_;
};

using InstancePtr = std::shared_ptr<const Instance>;

// Key of a plan entry: (side-0 atom index, side-1 atom index), independent of the source side.
using EdgeKey = std::pair<std::size_t, std::size_t>;

// Sparse nonnegative mass on pairs of atoms. Zero entries are never stored, so two
// plans compare equal iff they carry the same mass everywhere.
class Plan {
 public:
  Plan(InstancePtr instance, int source_side);
  Plan(InstancePtr instance, int source_side, const std::map<EdgeKey, Rational>& entries);

  const Instance& instance() const { return *instance_; }
  const InstancePtr& instance_ptr() const { return instance_; }
  int source_side() const { return source_side_; }
  int opposite_side() const { return 1 - source_side_; }
  const std::map<EdgeKey, Rational>& entries() const { return entries_; }

  Rational mass(std::size_t x, std::size_t y) const;
  void add(std::size_t x, std::size_t y, const Rational& value);
  Rational total() const;
  bool on_edges() const;
  Plan scaled(const Rational& factor) const;
  Plan operator+(const Plan& other) const;
  // Entrywise a <= b.
  bool dominated_by(const Plan& other) const;

  friend bool operator==(const Plan& a, const Plan& b);

 private:
  InstancePtr instance_;
  int source_side_;
  std::map<EdgeKey, Rational> entries_;
};

// mu = density * nu + singular, with density defined where nu > 0.
struct LebesgueSplit {
  std::vector<std::optional<Rational>> density;
  Measure singular;

  Measure absolutely_continuous(const Measure& nu) const;
};

Measure marginal(const Plan& plan, int side);
// Opposite-side marginal of a plan (its payload).
inline Measure payload(const Plan& plan) { return marginal(plan, plan.opposite_side()); }
LebesgueSplit lebesgue_decompose(const Measure& mu, const Measure& nu);
bool is_refinement(const Plan& plan);
Measure truncated_payload(const Plan& plan, const Rational& t);

}  // namespace refinet
