#include "refinet/overflow.hpp"

#include <stdexcept>

namespace refinet {

OverflowProfile::OverflowProfile(Rational singular_mass, std::map<Rational, Rational> weight_at_density)
    : singular_(std::move(singular_mass)), weights_(std::move(weight_at_density)) {
  if (singular_ < 0) throw std::invalid_argument("negative singular mass");
  for (const auto& [r, w] : weights_) {
    if (r < 0 || w < 0) throw std::invalid_argument("negative density or weight in overflow profile");
  }
}

Rational OverflowProfile::operator()(const Rational& t) const {
  Rational value = singular_;
  for (auto it = weights_.upper_bound(t); it != weights_.end(); ++it) value += it->second * (it->first - t);
  return value;
}

double OverflowProfile::evaluate(double t) const {
  double value = to_double(singular_);
  for (const auto& [r, w] : weights_) {
    double excess = to_double(r) - t;
    if (excess > 0) value += to_double(w) * excess;
  }
  return value;
}

std::vector<Rational> OverflowProfile::breakpoints() const {
  std::vector<Rational> out;
  out.reserve(weights_.size());
  for (const auto& [r, w] : weights_) out.push_back(r);
  return out;
}

Rational OverflowProfile::max_density() const { return weights_.empty() ? Rational(0) : weights_.rbegin()->first; }

}  // namespace refinet
