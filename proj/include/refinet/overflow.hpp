#pragma once

#include "refinet/rational.hpp"

#include <map>
#include <vector>

namespace refinet {

// Over(t) = singular_mass + sum_y nu(y) * (r(y) - t)_+ : convex, nonincreasing,
// piecewise linear with kinks at the occurring densities.
class OverflowProfile {
 public:
  OverflowProfile() = default;
  // `weight_at_density` maps each occurring density r to the total reference weight carrying it.
  OverflowProfile(Rational singular_mass, std::map<Rational, Rational> weight_at_density);

  Rational operator()(const Rational& t) const;
  double evaluate(double t) const;

  const Rational& singular_mass() const { return singular_; }
  const std::map<Rational, Rational>& weight_at_density() const { return weights_; }
  // Distinct occurring densities, ascending.
  std::vector<Rational> breakpoints() const;
  Rational max_density() const;

 private:
  Rational singular_ = 0;
  std::map<Rational, Rational> weights_;
};

}  // namespace refinet
