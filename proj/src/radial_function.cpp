#include "hml/radial_function.hpp"

#include <cmath>
#include <cstdio>

#include "hml/errors.hpp"

namespace hml {

namespace {

constexpr int kSeriesTerms = 40;
constexpr double kSeriesSwitch = 1.0;

std::vector<double> reexpand(const std::vector<double>& a, double t0, int order) {
  std::vector<double> b(static_cast<std::size_t>(order) + 1, 0.0);
  const int n_terms = static_cast<int>(a.size());
  for (int n = 0; n <= order && n < n_terms; ++n) {
    double acc = 0.0;
    // sum_{k>=n} C(k,n) a_k t0^(k-n), evaluated high to low.
    for (int k = n_terms - 1; k >= n; --k) {
      double binom = 1.0;
      for (int i = 1; i <= n; ++i) binom = binom * (k - n + i) / i;
      acc = acc * t0 + binom * a[static_cast<std::size_t>(k)];
    }
    b[static_cast<std::size_t>(n)] = acc;
  }
  return b;
}

const std::vector<double>& sinc_coeffs() {
  static const std::vector<double> a = [] {
    std::vector<double> v(kSeriesTerms);
    double f = 1.0;  // (2k+1)!
    for (int k = 0; k < kSeriesTerms; ++k) {
      if (k > 0) f *= (2.0 * k) * (2.0 * k + 1);
      v[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) / f;
    }
    return v;
  }();
  return a;
}

const std::vector<double>& cos_coeffs() {
  static const std::vector<double> a = [] {
    std::vector<double> v(kSeriesTerms);
    double f = 1.0;  // (2k)!
    for (int k = 0; k < kSeriesTerms; ++k) {
      if (k > 0) f *= (2.0 * k - 1) * (2.0 * k);
      v[static_cast<std::size_t>(k)] = ((k % 2) ? -1.0 : 1.0) / f;
    }
    return v;
  }();
  return a;
}

const std::vector<double>& sinc2_complement_coeffs() {
  // (1 - sinc^2)/t = sum_j (-1)^j 2^(2j+3) t^j / (2j+4)!
  static const std::vector<double> a = [] {
    std::vector<double> v(kSeriesTerms);
    for (int j = 0; j < kSeriesTerms; ++j) {
      double f = 1.0;
      for (int i = 2; i <= 2 * j + 4; ++i) f *= i;
      v[static_cast<std::size_t>(j)] = ((j % 2) ? -1.0 : 1.0) * std::ldexp(1.0, 2 * j + 3) / f;
    }
    return v;
  }();
  return a;
}

}  // namespace

Jet compose_power_series(const Jet& t, const std::vector<double>& a) {
  return compose(t, reexpand(a, t.value(), t.order()));
}

Jet sinc_sqrt(const Jet& t) {
  if (std::abs(t.value()) <= kSeriesSwitch) return compose_power_series(t, sinc_coeffs());
  if (t.value() < 0.0) {
    const Jet s = sqrt(-t);
    return 0.5 * (exp(s) - exp(-s)) / s;
  }
  const Jet s = sqrt(t);
  return sin(s) / s;
}

Jet cos_sqrt(const Jet& t) {
  if (std::abs(t.value()) <= kSeriesSwitch) return compose_power_series(t, cos_coeffs());
  if (t.value() < 0.0) {
    const Jet s = sqrt(-t);
    return 0.5 * (exp(s) + exp(-s));
  }
  return cos(sqrt(t));
}

Jet sinc2_complement(const Jet& t) {
  if (std::abs(t.value()) <= kSeriesSwitch) return compose_power_series(t, sinc2_complement_coeffs());
  const Jet s = sinc_sqrt(t);
  return (1.0 - s * s) / t;
}

// ---------------------------------------------------------------------------

RadialFunction::RadialFunction(std::string description, JetFn fn, double t_min, double t_max)
    : description_(std::move(description)), fn_(std::move(fn)), t_min_(t_min), t_max_(t_max) {}

RadialFunction RadialFunction::constant(double c) {
  RadialFunction f = polynomial({c});
  return f;
}

RadialFunction RadialFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  std::string desc = "poly[";
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) desc += ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", coeffs[i]);
    desc += buf;
  }
  desc += "]";
  auto c = coeffs;
  RadialFunction f(desc, [c](const Jet& t) {
    Jet r = Jet::constant(t.nvars(), t.order(), c.back());
    for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) {
      r = r * t;
      r += c[static_cast<std::size_t>(k)];
    }
    return r;
  });
  bool is_const = true;
  for (std::size_t i = 1; i < coeffs.size(); ++i) is_const = is_const && coeffs[i] == 0.0;
  if (is_const) f.constant_ = coeffs[0];
  f.coeffs_ = std::move(coeffs);
  return f;
}

RadialFunction RadialFunction::power_series(std::vector<double> coeffs, double radius, std::string description) {
  auto c = coeffs;
  RadialFunction f(std::move(description), [c](const Jet& t) { return compose_power_series(t, c); }, -radius,
                   radius);
  f.coeffs_ = std::move(coeffs);
  return f;
}

double RadialFunction::operator()(double t) const { return taylor(t, 0)[0]; }

Jet RadialFunction::operator()(const Jet& t) const {
  if (constant_) return Jet::constant(t.nvars(), t.order(), *constant_);
  if (coeffs_) return compose(t, reexpand(*coeffs_, t.value(), t.order()));
  return fn_(t);
}

std::vector<double> RadialFunction::taylor(double t0, int order) const {
  if (coeffs_) return reexpand(*coeffs_, t0, order);
  const Jet t = Jet::variable(1, order, 0, t0);
  const Jet r = fn_(t);
  return {r.coeffs().begin(), r.coeffs().end()};
}

double RadialFunction::derivative(double t, int n) const {
  const auto c = taylor(t, n);
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return c[static_cast<std::size_t>(n)] * f;
}

}  // namespace hml
