#include "refinet/lp_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace refinet {

namespace {

// max c.x  s.t.  A x <= b, x >= 0, with b >= 0 so the slack basis is feasible.
Rational simplex_max(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b,
                     const std::vector<Rational>& c) {
  std::size_t m = a.size();
  std::size_t n = c.size();
  std::size_t cols = n + m;
  std::vector<std::vector<Rational>> tab(m, std::vector<Rational>(cols + 1, Rational(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) throw std::invalid_argument("simplex needs a nonnegative right-hand side");
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = a[i][j];
    tab[i][n + i] = 1;
    tab[i][cols] = b[i];
    basis[i] = n + i;
  }
  // reduced[j] = c_j - z_j; objective value kept in reduced[cols] as -z.
  std::vector<Rational> reduced(cols + 1, Rational(0));
  for (std::size_t j = 0; j < n; ++j) reduced[j] = c[j];

  for (;;) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (reduced[j] > 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;

    std::size_t leave = m;
    Rational best_ratio = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] <= 0) continue;
      Rational ratio = tab[i][cols] / tab[i][enter];
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) throw std::runtime_error("linear program is unbounded");

    Rational pivot = tab[leave][enter];
    for (auto& v : tab[leave]) v /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter] == 0) continue;
      Rational f = tab[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    Rational f = reduced[enter];
    for (std::size_t j = 0; j <= cols; ++j) reduced[j] -= f * tab[leave][j];
    basis[leave] = enter;
  }
  return -reduced[cols];
}

std::size_t source_of(int side, const Edge& e) { return side == 0 ? e.x : e.y; }
std::size_t target_of(int side, const Edge& e) { return side == 0 ? e.y : e.x; }

EdgeKey key_of(int side, std::size_t src, std::size_t opp) { return side == 0 ? EdgeKey{src, opp} : EdgeKey{opp, src}; }

void require_side(int side) {
  if (side != 0 && side != 1) throw std::invalid_argument("side must be 0 or 1");
}

}  // namespace

Rational lp_fit(const InstancePtr& instance, int side, const Rational& t) {
  require_side(side);
  if (t < 0) throw std::invalid_argument("level must be nonnegative");
  const Instance& inst = *instance;
  const auto& edges = inst.edges();
  if (edges.size() > 64) throw std::invalid_argument("lp_fit is limited to 64 edges");
  const AtomSpace& src = inst.side(side);
  const AtomSpace& opp = inst.side(1 - side);

  std::vector<std::vector<Rational>> a(src.size() + opp.size(), std::vector<Rational>(edges.size(), Rational(0)));
  std::vector<Rational> b;
  for (std::size_t i = 0; i < src.size(); ++i) b.push_back(src.weight(i));
  for (std::size_t j = 0; j < opp.size(); ++j) b.push_back(t * opp.weight(j));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    a[source_of(side, edges[e])][e] = 1;
    a[src.size() + target_of(side, edges[e])][e] = 1;
  }
  return simplex_max(a, b, std::vector<Rational>(edges.size(), Rational(1)));
}

Plan random_feasible_plan(const InstancePtr& instance, int side, std::uint64_t seed) {
  require_side(side);
  const Instance& inst = *instance;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> draw(0, 8);
  Plan plan(instance, side);
  const AtomSpace& src = inst.side(side);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto& nb = inst.neighbors(side, i);
    if (src.weight(i) == 0 || nb.empty()) continue;
    std::vector<int> w(nb.size());
    for (auto& v : w) v = draw(rng);
    int total = std::accumulate(w.begin(), w.end(), 0);
    if (total == 0) {
      w[rng() % w.size()] = 1;
      total = 1;
    }
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (w[k] == 0) continue;
      auto [x, y] = key_of(side, i, nb[k]);
      plan.add(x, y, src.weight(i) * Rational(w[k]) / Rational(total));
    }
  }
  return plan;
}

std::vector<Plan> enumerate_extreme_plans(const InstancePtr& instance, int side) {
  require_side(side);
  const Instance& inst = *instance;
  if (inst.edges().size() > 12) throw std::invalid_argument("vertex enumeration is limited to 12 edges");
  const AtomSpace& src = inst.side(side);
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < src.size(); ++i)
    if (src.weight(i) > 0) positive.push_back(i);

  std::vector<Plan> out;
  std::vector<std::size_t> choice(positive.size(), 0);
  for (;;) {
    Plan plan(instance, side);
    for (std::size_t k = 0; k < positive.size(); ++k) {
      std::size_t i = positive[k];
      auto [x, y] = key_of(side, i, inst.neighbors(side, i)[choice[k]]);
      plan.add(x, y, src.weight(i));
    }
    out.push_back(std::move(plan));
    std::size_t k = 0;
    while (k < positive.size() && ++choice[k] == inst.neighbors(side, positive[k]).size()) choice[k++] = 0;
    if (k == positive.size()) break;
  }
  return out;
}

namespace {

// Euclidean projection onto {q >= 0, sum q = mass}.
void project_simplex(std::vector<double>& v, double mass) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    double candidate = (cumulative - mass) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0) shift = candidate;
  }
  for (auto& x : v) x = std::max(x - shift, 0.0);
}

struct Variable {
  std::size_t row;
  std::size_t target;
};

class DescentProblem {
 public:
  DescentProblem(const Instance& inst, int side, const Integrand& theta) : theta_(theta) {
    const AtomSpace& src = inst.side(side);
    const AtomSpace& opp = inst.side(1 - side);
    nu_opp_.resize(opp.size());
    for (std::size_t j = 0; j < opp.size(); ++j) nu_opp_[j] = to_double(opp.weight(j));
    slope_inf_ = theta.recession_slope.is_finite() ? theta.recession_slope.to_double()
                                                   : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src.weight(i) == 0) continue;
      Row row{i, to_double(src.weight(i)), src.weight(i), {}};
      const auto& nb = inst.neighbors(side, i);
      bool has_positive = std::any_of(nb.begin(), nb.end(), [&](std::size_t j) { return opp.weight(j) > 0; });
      for (std::size_t j : nb) {
        // Infinite recession slope: never route to a null atom when an alternative exists.
        if (std::isinf(slope_inf_) && has_positive && opp.weight(j) == 0) continue;
        row.targets.push_back(j);
      }
      rows_.push_back(std::move(row));
    }
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.targets.size();
    return n;
  }

  std::vector<double> barycenter() const {
    std::vector<double> x;
    for (const auto& r : rows_)
      for (std::size_t k = 0; k < r.targets.size(); ++k) x.push_back(r.mass / static_cast<double>(r.targets.size()));
    return x;
  }

  std::vector<double> payload(const std::vector<double>& x) const {
    std::vector<double> p(nu_opp_.size(), 0.0);
    std::size_t k = 0;
    for (const auto& r : rows_)
      for (std::size_t j : r.targets) p[j] += x[k++];
    return p;
  }

  double objective(const std::vector<double>& x) const {
    std::vector<double> p = payload(x);
    double value = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (nu_opp_[j] > 0) {
        value += nu_opp_[j] * theta_.value_d(p[j] / nu_opp_[j]);
      } else if (p[j] > 0) {
        value += slope_inf_ * p[j];
      }
    }
    return value;
  }

  std::vector<double> gradient(const std::vector<double>& x) const {
    std::vector<double> p = payload(x);
    std::vector<double> g_opp(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      g_opp[j] = nu_opp_[j] > 0 ? theta_.slope_d(std::max(p[j] / nu_opp_[j], 1e-12)) : slope_inf_;
    }
    std::vector<double> g;
    g.reserve(x.size());
    for (const auto& r : rows_)
      for (std::size_t j : r.targets) g.push_back(g_opp[j]);
    return g;
  }

  void project(std::vector<double>& x) const {
    std::size_t k = 0;
    for (const auto& r : rows_) {
      std::vector<double> block(x.begin() + k, x.begin() + k + r.targets.size());
      project_simplex(block, r.mass);
      std::copy(block.begin(), block.end(), x.begin() + k);
      k += r.targets.size();
    }
  }

  Plan rationalize(const InstancePtr& instance, int side, const std::vector<double>& x) const {
    Plan plan(instance, side);
    std::size_t k = 0;
    const double grid = 1099511627776.0;  // 2^40
    for (const auto& r : rows_) {
      std::vector<Rational> q;
      Rational sum = 0;
      std::size_t largest = 0;
      for (std::size_t t = 0; t < r.targets.size(); ++t) {
        double v = x[k + t];
        if (v > x[k + largest]) largest = t;
        q.push_back(Rational(static_cast<long long>(std::llround(std::max(v, 0.0) * grid))) / Rational(1099511627776LL));
        sum += q.back();
      }
      if (sum == 0) {
        q[largest] = 1;
        sum = 1;
      }
      for (std::size_t t = 0; t < r.targets.size(); ++t) {
        if (q[t] == 0) continue;
        auto [a, b] = key_of(side, r.source, r.targets[t]);
        plan.add(a, b, r.exact_mass * q[t] / sum);
      }
      k += r.targets.size();
    }
    return plan;
  }

  bool forced_infinite() const {
    if (!std::isinf(slope_inf_)) return false;
    for (const auto& r : rows_)
      for (std::size_t j : r.targets)
        if (nu_opp_[j] == 0) return true;
    return false;
  }

  std::vector<double> plan_vector(const Plan& plan, int side) const {
    std::vector<double> x;
    for (const auto& r : rows_) {
      for (std::size_t j : r.targets) {
        auto [a, b] = key_of(side, r.source, j);
        x.push_back(to_double(plan.mass(a, b)));
      }
    }
    return x;
  }

 private:
  struct Row {
    std::size_t source;
    double mass;
    Rational exact_mass;
    std::vector<std::size_t> targets;
  };
  const Integrand& theta_;
  std::vector<double> nu_opp_;
  double slope_inf_;
  std::vector<Row> rows_;
};

double dot_diff(const std::vector<double>& g, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += g[k] * (a[k] - b[k]);
  return s;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

}  // namespace

OracleResult min_divergence_oracle(const InstancePtr& instance, int side, const Integrand& theta, double tol,
                                   const OracleOptions& options) {
  require_side(side);
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!theta.value_d || !theta.slope_d) throw std::invalid_argument("integrand lacks floating-point evaluation");
  DescentProblem problem(*instance, side, theta);

  std::vector<double> x = problem.barycenter();
  if (problem.forced_infinite()) {
    return {problem.rationalize(instance, side, x), std::numeric_limits<double>::infinity(), 0};
  }

  // FISTA with backtracking on the step and a function-value restart.
  std::vector<double> y = x;
  double fx = problem.objective(x);
  double lipschitz = 1.0;
  double momentum = 1.0;
  int stalled = 0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    std::vector<double> g = problem.gradient(y);
    double fy = problem.objective(y);
    std::vector<double> next;
    double fnext = 0.0;
    for (int halvings = 0;; ++halvings) {
      next = y;
      for (std::size_t k = 0; k < next.size(); ++k) next[k] -= g[k] / lipschitz;
      problem.project(next);
      fnext = problem.objective(next);
      double model = fy + dot_diff(g, next, y) + 0.5 * lipschitz * sq_dist(next, y);
      if (fnext <= model + 1e-15 * (1.0 + std::fabs(fy)) || halvings > 60) break;
      lipschitz *= 2.0;
    }

    if (fnext > fx) {
      // Restart from the last iterate without momentum.
      momentum = 1.0;
      y = x;
      if (++stalled >= options.patience) break;
      continue;
    }
    double decrease = fx - fnext;
    double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    std::vector<double> extrapolated = next;
    for (std::size_t k = 0; k < next.size(); ++k) {
      extrapolated[k] += (momentum - 1.0) / next_momentum * (next[k] - x[k]);
    }
    x = std::move(next);
    fx = fnext;
    y = std::move(extrapolated);
    momentum = next_momentum;
    lipschitz *= 0.95;
    stalled = decrease < tol * (1.0 + std::fabs(fx)) ? stalled + 1 : 0;
    if (stalled >= options.patience) break;
  }

  Plan plan = problem.rationalize(instance, side, x);
  double value = problem.objective(problem.plan_vector(plan, side));
  return {std::move(plan), value, iter};
}

}  // namespace refinet
