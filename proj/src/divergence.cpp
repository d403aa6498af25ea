#include "refinet/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace refinet {

ExtendedValue ExtendedValue::approx(double v) {
  if (std::isnan(v)) throw std::domain_error("NaN divergence value");
  if (std::isinf(v)) return v > 0 ? pos_inf() : neg_inf();
  ExtendedValue out(Kind::Approx);
  out.approx_ = v;
  return out;
}

const Rational& ExtendedValue::exact() const {
  if (kind_ != Kind::Exact) throw std::logic_error("extended value is not an exact rational");
  return exact_;
}

double ExtendedValue::to_double() const {
  switch (kind_) {
    case Kind::Exact: return refinet::to_double(exact_);
    case Kind::Approx: return approx_;
    case Kind::PosInf: return std::numeric_limits<double>::infinity();
    case Kind::NegInf: return -std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::string ExtendedValue::to_string() const {
  switch (kind_) {
    case Kind::Exact: return refinet::to_string(exact_);
    case Kind::PosInf: return "+inf";
    case Kind::NegInf: return "-inf";
    case Kind::Approx: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << approx_;
  return os.str();
}

ExtendedValue ExtendedValue::operator+(const ExtendedValue& o) const {
  if ((is_pos_inf() && o.is_neg_inf()) || (is_neg_inf() && o.is_pos_inf())) {
    throw std::domain_error("undefined sum +inf + -inf");
  }
  if (is_pos_inf() || o.is_pos_inf()) return pos_inf();
  if (is_neg_inf() || o.is_neg_inf()) return neg_inf();
  if (is_exact() && o.is_exact()) return ExtendedValue(exact_ + o.exact_);
  return approx(to_double() + o.to_double());
}

ExtendedValue ExtendedValue::operator-() const {
  switch (kind_) {
    case Kind::Exact: return ExtendedValue(Rational(-exact_));
    case Kind::Approx: return approx(-approx_);
    case Kind::PosInf: return neg_inf();
    case Kind::NegInf: return pos_inf();
  }
  return *this;
}

ExtendedValue ExtendedValue::weighted(const Rational& w) const {
  if (w < 0) throw std::invalid_argument("negative weight");
  if (w == 0) return ExtendedValue(Rational(0));
  switch (kind_) {
    case Kind::Exact: return ExtendedValue(Rational(exact_ * w));
    case Kind::Approx: return approx(approx_ * refinet::to_double(w));
    default: return *this;
  }
}

ExtendedValue ExtendedValue::operator*(const ExtendedValue& o) const {
  if (is_exact() && o.is_exact()) return ExtendedValue(Rational(exact_ * o.exact_));
  double a = to_double();
  double b = o.to_double();
  if ((a == 0.0 && std::isinf(b)) || (b == 0.0 && std::isinf(a))) return ExtendedValue(Rational(0));
  return approx(a * b);
}

bool leq(const ExtendedValue& a, const ExtendedValue& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a.exact() <= b.exact();
  if (a.is_neg_inf() || b.is_pos_inf()) return true;
  if (a.is_pos_inf() || b.is_neg_inf()) return false;
  return a.to_double() <= b.to_double() + tol;
}

bool approx_equal(const ExtendedValue& a, const ExtendedValue& b, double tol) {
  if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
  if (!a.is_finite() || !b.is_finite()) return a.kind() == b.kind();
  return std::fabs(a.to_double() - b.to_double()) <= tol;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ExtendedValue exact_value(Rational q) { return ExtendedValue(std::move(q)); }

}  // namespace

Integrand hockey_stick_integrand(const Rational& gamma) {
  if (gamma <= 0) throw std::invalid_argument("hockey-stick level must be positive");
  Integrand f;
  f.name = "hs:" + to_string(gamma);
  f.exact = true;
  f.piecewise_linear = true;
  f.value = [gamma](const Rational& t) { return exact_value(positive_part(t - gamma)); };
  f.right_derivative = [gamma](const Rational& t) { return exact_value(Rational(t >= gamma ? 1 : 0)); };
  f.left_derivative = [gamma](const Rational& t) { return exact_value(Rational(t > gamma ? 1 : 0)); };
  f.recession_slope = Rational(1);
  f.asymptotic_intercept = Rational(-gamma);
  f.kinks = {{gamma, Rational(1)}};
  double g = to_double(gamma);
  f.value_d = [g](double t) { return t > g ? t - g : 0.0; };
  f.slope_d = [g](double t) { return t >= g ? 1.0 : 0.0; };
  return f;
}

Integrand square_integrand() {
  Integrand f;
  f.name = "square";
  f.exact = true;
  f.strictly_convex = true;
  f.value = [](const Rational& t) { return exact_value(t * t); };
  f.right_derivative = [](const Rational& t) { return exact_value(2 * t); };
  f.left_derivative = f.right_derivative;
  f.recession_slope = ExtendedValue::pos_inf();
  f.asymptotic_intercept = ExtendedValue::neg_inf();
  f.value_d = [](double t) { return t * t; };
  f.slope_d = [](double t) { return 2.0 * t; };
  return f;
}

Integrand exp_neg_integrand() {
  Integrand f;
  f.name = "exp_neg";
  f.strictly_convex = true;
  f.value = [](const Rational& t) { return ExtendedValue::approx(std::exp(-to_double(t))); };
  f.right_derivative = [](const Rational& t) { return ExtendedValue::approx(-std::exp(-to_double(t))); };
  f.left_derivative = f.right_derivative;
  f.recession_slope = Rational(0);
  f.asymptotic_intercept = Rational(0);
  f.value_d = [](double t) { return std::exp(-t); };
  f.slope_d = [](double t) { return -std::exp(-t); };
  return f;
}

Integrand x_log_x_integrand() {
  Integrand f;
  f.name = "xlogx";
  f.strictly_convex = true;
  f.value = [](const Rational& t) {
    if (t == 0) return ExtendedValue(Rational(0));
    if (t == 1) return ExtendedValue(Rational(0));
    double x = to_double(t);
    return ExtendedValue::approx(x * std::log(x));
  };
  f.right_derivative = [](const Rational& t) {
    if (t == 0) return ExtendedValue::neg_inf();
    return ExtendedValue::approx(std::log(to_double(t)) + 1.0);
  };
  f.left_derivative = f.right_derivative;
  f.recession_slope = ExtendedValue::pos_inf();
  f.asymptotic_intercept = ExtendedValue::neg_inf();
  f.value_d = [](double t) { return t > 0 ? t * std::log(t) : 0.0; };
  f.slope_d = [](double t) { return t > 0 ? std::log(t) + 1.0 : -kInf; };
  return f;
}

Integrand abs_minus_one_integrand() {
  Integrand f;
  f.name = "abs";
  f.exact = true;
  f.piecewise_linear = true;
  f.value = [](const Rational& t) { return exact_value(t >= 1 ? Rational(t - 1) : Rational(1 - t)); };
  f.right_derivative = [](const Rational& t) { return exact_value(Rational(t >= 1 ? 1 : -1)); };
  f.left_derivative = [](const Rational& t) { return exact_value(Rational(t > 1 ? 1 : -1)); };
  f.recession_slope = Rational(1);
  f.asymptotic_intercept = Rational(-1);
  f.kinks = {{Rational(1), Rational(2)}};
  f.value_d = [](double t) { return std::fabs(t - 1.0); };
  f.slope_d = [](double t) { return t >= 1.0 ? 1.0 : -1.0; };
  return f;
}

Integrand chi_square_integrand() {
  Integrand f;
  f.name = "chi2";
  f.exact = true;
  f.strictly_convex = true;
  f.value = [](const Rational& t) { return exact_value((t - 1) * (t - 1)); };
  f.right_derivative = [](const Rational& t) { return exact_value(2 * (t - 1)); };
  f.left_derivative = f.right_derivative;
  f.recession_slope = ExtendedValue::pos_inf();
  f.asymptotic_intercept = ExtendedValue::neg_inf();
  f.value_d = [](double t) { return (t - 1.0) * (t - 1.0); };
  f.slope_d = [](double t) { return 2.0 * (t - 1.0); };
  return f;
}

Integrand linear_integrand(const Rational& slope, const Rational& intercept) {
  Integrand f;
  f.name = "linear:" + to_string(slope) + ":" + to_string(intercept);
  f.exact = true;
  f.piecewise_linear = true;
  f.value = [slope, intercept](const Rational& t) { return exact_value(slope * t + intercept); };
  f.right_derivative = [slope](const Rational&) { return exact_value(slope); };
  f.left_derivative = f.right_derivative;
  f.recession_slope = slope;
  f.asymptotic_intercept = intercept;
  double a = to_double(slope);
  double b = to_double(intercept);
  f.value_d = [a, b](double t) { return a * t + b; };
  f.slope_d = [a](double) { return a; };
  return f;
}

Integrand integrand_by_name(const std::string& spec) {
  if (spec.rfind("hs:", 0) == 0) return hockey_stick_integrand(parse_rational(spec.substr(3)));
  if (spec == "square") return square_integrand();
  if (spec == "exp_neg") return exp_neg_integrand();
  if (spec == "xlogx") return x_log_x_integrand();
  if (spec == "abs") return abs_minus_one_integrand();
  if (spec == "chi2") return chi_square_integrand();
  if (spec.rfind("linear:", 0) == 0) {
    auto rest = spec.substr(7);
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("linear integrand needs linear:<a>:<b>");
    return linear_integrand(parse_rational(rest.substr(0, colon)), parse_rational(rest.substr(colon + 1)));
  }
  throw std::invalid_argument("unknown integrand '" + spec + "'");
}

ExtendedValue f_divergence(const Measure& p, const Measure& q, const Integrand& theta) {
  if (!same_space(p.space_ptr(), q.space_ptr())) throw std::invalid_argument("space mismatch");
  ExtendedValue sum(Rational(0));
  Rational singular = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > 0) {
      sum = sum + theta.value(p[i] / q[i]).weighted(q[i]);
    } else {
      singular += p[i];
    }
  }
  if (singular > 0) sum = sum + theta.recession_slope.weighted(singular);
  return sum;
}

Rational hockey_stick(const Measure& p, const Measure& q, const Rational& gamma) {
  if (gamma <= 0) throw std::invalid_argument("hockey-stick level must be positive");
  if (!same_space(p.space_ptr(), q.space_ptr())) throw std::invalid_argument("space mismatch");
  Rational sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] > 0) {
      sum += positive_part(p[i] - gamma * q[i]);
    } else {
      sum += p[i];
    }
  }
  return sum;
}

Integrand adjoint_integrand(const Integrand& theta) {
  Integrand f;
  f.name = "adjoint(" + theta.name + ")";
  f.exact = theta.exact;
  f.strictly_convex = theta.strictly_convex;
  f.piecewise_linear = theta.piecewise_linear;
  ExtendedValue at_zero = theta.recession_slope;
  auto value = theta.value;
  f.value = [value, at_zero](const Rational& t) {
    if (t == 0) return at_zero;
    return value(1 / t).weighted(t);
  };
  // d/dt [t θ(1/t)] = θ(s) - s θ'(s) with s = 1/t; the right derivative in t uses the left one in s.
  auto left = theta.left_derivative;
  auto right = theta.right_derivative;
  ExtendedValue intercept = theta.asymptotic_intercept;
  f.right_derivative = [value, left, intercept](const Rational& t) {
    if (t == 0) return intercept;
    Rational s = 1 / t;
    return value(s) + (-left(s).weighted(s));
  };
  f.left_derivative = [value, right](const Rational& t) {
    Rational s = 1 / t;
    return value(s) + (-right(s).weighted(s));
  };
  f.recession_slope = theta.value(Rational(0));
  f.asymptotic_intercept = theta.right_derivative(Rational(0));
  for (const auto& [c, jump] : theta.kinks) f.kinks.emplace_back(1 / c, jump * c);
  auto vd = theta.value_d;
  auto sd = theta.slope_d;
  double zero_d = at_zero.to_double();
  f.value_d = [vd, zero_d](double t) { return t == 0.0 ? zero_d : t * vd(1.0 / t); };
  double intercept_d = intercept.to_double();
  f.slope_d = [vd, sd, intercept_d](double t) {
    if (t == 0.0) return intercept_d;
    double s = 1.0 / t;
    return vd(s) - s * sd(s);
  };
  return f;
}

ExtendedValue hinge_reconstruct(const Integrand& phi, const OverflowProfile& over, const Rational& nu_bar_total,
                                const Rational& nu_iota_total, int quad_points) {
  if (!phi.recession_slope.is_finite()) throw std::domain_error("hinge representation needs a finite recession slope");
  ExtendedValue phi0 = phi.value(Rational(0));
  ExtendedValue slope0 = phi.right_derivative(Rational(0));
  if (!phi0.is_finite() || !slope0.is_finite()) {
    throw std::domain_error("hinge representation needs finite value and slope at 0");
  }
  ExtendedValue base = phi0.weighted(nu_bar_total) + slope0.weighted(nu_iota_total);

  if (phi.piecewise_linear) {
    ExtendedValue sum = base;
    for (const auto& [c, jump] : phi.kinks) sum = sum + ExtendedValue(Rational(jump * over(c)));
    return sum;
  }

  if (quad_points < 1) throw std::invalid_argument("quad_points must be positive");
  // Over is linear between occurring densities, so each cell of a piece integrates exactly by
  // parts: int_a^b Over dphi' = [Over phi']_a^b - slope * (phi(b) - phi(a)).
  double top = to_double(over.max_density());
  double integral = 0.0;
  if (top > 0.0) {
    std::vector<double> knots{0.0};
    for (const auto& r : over.breakpoints()) {
      double v = to_double(r);
      if (v > knots.back()) knots.push_back(v);
    }
    for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
      double a = knots[piece];
      double b = knots[piece + 1];
      double over_a = over.evaluate(a);
      double slope = (over.evaluate(b) - over_a) / (b - a);
      int cells = std::max(1, static_cast<int>(std::ceil(quad_points * (b - a) / top)));
      double h = (b - a) / cells;
      double left = a;
      for (int k = 0; k < cells; ++k) {
        double right = k + 1 == cells ? b : a + (k + 1) * h;
        double o_left = over_a + slope * (left - a);
        double o_right = over_a + slope * (right - a);
        integral += o_right * phi.slope_d(right) - o_left * phi.slope_d(left) -
                    slope * (phi.value_d(right) - phi.value_d(left));
        left = right;
      }
    }
  }
  double tail = to_double(over.singular_mass()) * (phi.recession_slope.to_double() - phi.slope_d(top));
  return base + ExtendedValue::approx(integral + tail);
}

void MarkovKernel::validate() const {
  if (!from || !to) throw std::invalid_argument("kernel needs source and target spaces");
  if (rows.size() != from->size()) throw std::invalid_argument("kernel needs one row per source atom");
  for (const auto& row : rows) {
    if (row.size() != to->size()) throw std::invalid_argument("kernel row has the wrong length");
    Rational sum = 0;
    for (const auto& v : row) {
      if (v < 0) throw std::invalid_argument("kernel entries must be nonnegative");
      sum += v;
    }
    if (sum != 1) throw std::invalid_argument("kernel rows must sum to 1");
  }
}

Measure MarkovKernel::push(const Measure& m) const {
  if (!same_space(m.space_ptr(), from)) throw std::invalid_argument("space mismatch");
  Measure out(to);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (m[i] == 0) continue;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] != 0) out.add(j, m[i] * rows[i][j]);
    }
  }
  return out;
}

bool dpi_audit(const Measure& p, const Measure& q, const MarkovKernel& kernel, const Integrand& theta) {
  kernel.validate();
  ExtendedValue before = f_divergence(p, q, theta);
  ExtendedValue after = f_divergence(kernel.push(p), kernel.push(q), theta);
  return leq(after, before, 1e-9);
}

}  // namespace refinet
