#include "refinet/appendix_b.hpp"

#include "refinet/divergence.hpp"
#include "refinet/lp_reference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace refinet {

namespace {

double log_branch_density(double y, double eps) { return (1.0 - y) / eps + std::log(eps / (1.0 - y)); }

}  // namespace

double appendix_b_value(const Rational& epsilon, int quad_points) {
  if (epsilon <= 0 || epsilon * 2 >= 1) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  if (quad_points < 64) throw std::invalid_argument("quad_points must be at least 64");
  int cells = quad_points % 2 == 0 ? quad_points : quad_points + 1;
  double eps = to_double(epsilon);

  // First branch y/eps on [0, eps] and the flat branch on (eps, 1 - eps].
  double polynomial = eps / 3.0 + (1.0 - 2.0 * eps);

  // y = 1 - eps v^3 tames the logarithmic endpoint; dy = 3 eps v^2 dv.
  auto integrand = [eps](double v) {
    if (v == 0.0) return 0.0;
    double y = 1.0 - eps * v * v * v;
    double p = log_branch_density(y, eps);
    return p * p * 3.0 * eps * v * v;
  };
  double h = 1.0 / cells;
  double sum = integrand(0.0) + integrand(1.0);
  for (int k = 1; k < cells; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * integrand(k * h);
  return polynomial + sum * h / 3.0;
}

InstancePtr grid_instance(int n, GridRelation relation) {
  if (n < 4) throw std::invalid_argument("grid needs n >= 4");
  std::vector<Atom> xs, ys;
  Rational w = Rational(1) / Rational(n);
  for (int i = 0; i < n; ++i) {
    xs.push_back({"x" + std::to_string(i), w});
    ys.push_back({"y" + std::to_string(i), w});
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool linked = relation == GridRelation::Closed ? j >= i : (j >= i + 1 || (i == j && (i == 0 || i == n - 1)));
      if (linked) edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    }
  }
  return std::make_shared<const Instance>(std::make_shared<const AtomSpace>(xs), std::make_shared<const AtomSpace>(ys),
                                          edges);
}

GridResult discretized_infimum(int n, GridRelation relation, double tol) {
  OracleOptions options;
  options.max_iterations = 400000;
  OracleResult r = min_divergence_oracle(grid_instance(n, relation), 0, square_integrand(), tol, options);
  return {r.value, r.iterations};
}

}  // namespace refinet
