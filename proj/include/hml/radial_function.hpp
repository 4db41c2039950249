#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hml/jet.hpp"

namespace hml {

/// An analytic function psi(t) of one variable with derivatives to any supported order.
/// Used as a conformal factor with t = r^2 (or another declared radial variable).
class RadialFunction {
 public:
  using JetFn = std::function<Jet(const Jet&)>;

  RadialFunction(std::string description, JetFn fn,
                 double t_min = -std::numeric_limits<double>::infinity(),
                 double t_max = std::numeric_limits<double>::infinity());

  static RadialFunction constant(double c);
  /// sum_k coeffs[k] t^k
  static RadialFunction polynomial(std::vector<double> coeffs);
  /// Convergent power series about t = 0, trusted on |t| < radius.
  static RadialFunction power_series(std::vector<double> coeffs, double radius, std::string description);

  double operator()(double t) const;
  Jet operator()(const Jet& t) const;
  /// Taylor coefficients psi^(n)(t0)/n! for n = 0..order.
  std::vector<double> taylor(double t0, int order) const;
  double derivative(double t, int n) const;

  std::optional<double> constant_value() const { return constant_; }
  const std::string& description() const { return description_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  bool in_domain(double t) const { return t >= t_min_ && t <= t_max_; }

 private:
  std::string description_;
  JetFn fn_;
  double t_min_, t_max_;
  std::optional<double> constant_;
  std::optional<std::vector<double>> coeffs_;  // polynomial / power-series representation
};

/// Re-expand sum_k a_k t^k about t0 and compose with the jet `t`.
Jet compose_power_series(const Jet& t, const std::vector<double>& a);

// Entire functions of t = r^2 appearing in normal-coordinate charts. Small |t|
// goes through the power series, larger |t| through closed forms in sqrt(|t|).
Jet sinc_sqrt(const Jet& t);        // sin(sqrt t) / sqrt t
Jet cos_sqrt(const Jet& t);         // cos(sqrt t)
Jet sinc2_complement(const Jet& t);  // (1 - sinc_sqrt(t)^2) / t

}  // namespace hml
