#pragma once

// The attainment-failure example on the unit square: closed-form family and grid discretizations.

#include "refinet/measure.hpp"
#include "refinet/rational.hpp"

namespace refinet {

// Squared payload density of the strip plan of half-width epsilon, integrated over [0, 1]:
// exact on the two polynomial branches, composite Simpson (after y = 1 - eps v^3) on the log branch.
double appendix_b_value(const Rational& epsilon, int quad_points);

enum class GridRelation { Closed, Open };

// n atoms of weight 1/n per side. Closed: y_j ~ x_i iff j >= i. Open: j >= i + 1, plus the two
// corner cells (0,0) and (n-1,n-1) so that no positive atom is isolated.
InstancePtr grid_instance(int n, GridRelation relation);

struct GridResult {
  double value;
  int iterations;
};

// Oracle minimum of sum nu (P/nu)^2 over refinements from side 0 of the grid instance.
GridResult discretized_infimum(int n, GridRelation relation, double tol = 1e-12);

}  // namespace refinet
