#pragma once

// Convex integrands and the divergences built from them.

#include "refinet/measure.hpp"
#include "refinet/overflow.hpp"
#include "refinet/rational.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace refinet {

// A value in R ∪ {±∞}. Finite values are exact rationals when every input was
// exact, and doubles once a transcendental integrand has been involved.
class ExtendedValue {
 public:
  enum class Kind { Exact, Approx, PosInf, NegInf };

  ExtendedValue() : ExtendedValue(Rational(0)) {}
  ExtendedValue(Rational exact) : kind_(Kind::Exact), exact_(std::move(exact)) {}  // NOLINT
  static ExtendedValue approx(double v);
  static ExtendedValue pos_inf() { return ExtendedValue(Kind::PosInf); }
  static ExtendedValue neg_inf() { return ExtendedValue(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ == Kind::Exact; }
  bool is_finite() const { return kind_ == Kind::Exact || kind_ == Kind::Approx; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  const Rational& exact() const;
  double to_double() const;
  std::string to_string() const;

  ExtendedValue operator+(const ExtendedValue& o) const;
  ExtendedValue operator-() const;
  // Product with a nonnegative weight; 0 * (±∞) = 0.
  ExtendedValue weighted(const Rational& w) const;
  ExtendedValue operator*(const ExtendedValue& o) const;

 private:
  explicit ExtendedValue(Kind k) : kind_(k) {}
  Kind kind_;
  Rational exact_ = 0;
  double approx_ = 0.0;
};

// a <= b, exactly when both are exact rationals and with slack `tol` otherwise.
bool leq(const ExtendedValue& a, const ExtendedValue& b, double tol = 1e-9);
bool approx_equal(const ExtendedValue& a, const ExtendedValue& b, double tol = 1e-9);

// Proper convex lower semicontinuous function on [0, ∞).
struct Integrand {
  std::string name;
  bool exact = false;
  bool strictly_convex = false;
  bool piecewise_linear = false;

  std::function<ExtendedValue(const Rational&)> value;
  std::function<ExtendedValue(const Rational&)> right_derivative;
  // Only queried at t > 0.
  std::function<ExtendedValue(const Rational&)> left_derivative;

  // lim value(t)/t.
  ExtendedValue recession_slope;
  // lim value(t) - t * recession_slope; -∞ whenever the slope is infinite.
  ExtendedValue asymptotic_intercept;
  // Jumps of the right derivative at points in (0, ∞); complete when piecewise_linear.
  std::vector<std::pair<Rational, Rational>> kinks;

  // Floating-point versions used by descent and quadrature.
  std::function<double(double)> value_d;
  std::function<double(double)> slope_d;
};

Integrand hockey_stick_integrand(const Rational& gamma);
Integrand square_integrand();
Integrand exp_neg_integrand();
Integrand x_log_x_integrand();
Integrand abs_minus_one_integrand();
Integrand chi_square_integrand();
Integrand linear_integrand(const Rational& slope, const Rational& intercept);
// Parses "hs:<gamma>", "square", "exp_neg", "xlogx", "abs", "chi2", "linear:<a>:<b>".
Integrand integrand_by_name(const std::string& spec);

// sum_{Q>0} Q θ(P/Q) + θ'_∞ · sum_{Q=0} P. Atoms with P = Q = 0 contribute nothing.
ExtendedValue f_divergence(const Measure& p, const Measure& q, const Integrand& theta);

// sum (P - γQ)_+ over Q-positive atoms plus the Q-singular mass of P.
Rational hockey_stick(const Measure& p, const Measure& q, const Rational& gamma);

// θ̂(t) = t θ(1/t), θ̂(0) = θ'_∞.
Integrand adjoint_integrand(const Integrand& theta);

// φ(0)·ν̄(Ω) + φ'_+(0)·ν_ι(Ω) + ∫ Over dμ_φ, where μ_φ is the Stieltjes measure of φ'_+.
// Piecewise-linear φ is summed over its kinks exactly; otherwise μ_φ is discretized on
// `quad_points` cells up to the largest density and the constant tail is added in closed form.
ExtendedValue hinge_reconstruct(const Integrand& phi, const OverflowProfile& over, const Rational& nu_bar_total,
                                const Rational& nu_iota_total, int quad_points);

// Row-stochastic map between two atom spaces.
struct MarkovKernel {
  SpacePtr from;
  SpacePtr to;
  std::vector<std::vector<Rational>> rows;

  // Throws std::invalid_argument unless every row is nonnegative and sums to 1.
  void validate() const;
  Measure push(const Measure& m) const;
};

// D(K#P || K#Q) <= D(P || Q), exact for exact integrands and within 1e-9 otherwise.
bool dpi_audit(const Measure& p, const Measure& q, const MarkovKernel& kernel, const Integrand& theta);

}  // namespace refinet
