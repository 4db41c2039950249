#pragma once

// Truncated univariate power series sum_{k<=N} c_k r^k over an exact rational
// field or doubles, plus a least-squares fit of radial density expansions.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hml/errors.hpp"

namespace hml {

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline Rational exact_sqrt(const Rational& q) {
  using boost::multiprecision::cpp_int;
  if (q < 0) throw InvalidArgument("series sqrt: negative constant term");
  const cpp_int n = numerator(q), d = denominator(q);
  const cpp_int sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) throw InvalidArgument("series sqrt: constant term is not a rational square");
  return Rational(sn, sd);
}

inline double exact_sqrt(double q) {
  if (!(q > 0)) throw InvalidArgument("series sqrt: constant term must be positive");
  return std::sqrt(q);
}

}  // namespace detail

template <class T>
class TruncatedSeries {
 public:
  TruncatedSeries() : c_(1, T(0)) {}
  explicit TruncatedSeries(int order) : c_(static_cast<std::size_t>(check(order)) + 1, T(0)) {}
  TruncatedSeries(std::vector<T> coeffs, int order) : c_(std::move(coeffs)) {
    c_.resize(static_cast<std::size_t>(check(order)) + 1, T(0));
  }

  static TruncatedSeries constant(const T& v, int order) {
    TruncatedSeries s(order);
    s.c_[0] = v;
    return s;
  }
  /// r^k
  static TruncatedSeries monomial(int k, int order, const T& coeff = T(1)) {
    TruncatedSeries s(order);
    if (k <= order) s.c_[static_cast<std::size_t>(k)] = coeff;
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  /// Coefficient of r^k, zero beyond the stored range is not implied: throws instead.
  T coeff(int k) const {
    if (k < 0 || k > order()) throw OrderExceeded("series coefficient r^" + std::to_string(k) + " beyond truncation");
    return c_[static_cast<std::size_t>(k)];
  }
  const std::vector<T>& coeffs() const { return c_; }
  int valuation() const {
    for (int k = 0; k <= order(); ++k)
      if (c_[static_cast<std::size_t>(k)] != T(0)) return k;
    return order() + 1;
  }

  TruncatedSeries truncated(int order) const {
    if (order > this->order()) throw OrderExceeded("series: cannot raise truncation order");
    return TruncatedSeries(std::vector<T>(c_.begin(), c_.begin() + order + 1), order);
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    same_order(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    same_order(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  TruncatedSeries& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  TruncatedSeries operator-() const {
    TruncatedSeries r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, const T& s) { return a *= s; }
  friend TruncatedSeries operator*(const T& s, TruncatedSeries a) { return a *= s; }
  friend TruncatedSeries operator+(TruncatedSeries a, const T& s) {
    a.c_[0] += s;
    return a;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.same_order(b);
    const int n = a.order();
    TruncatedSeries r(n);
    for (int i = 0; i <= n; ++i) {
      if (a[i] == T(0)) continue;
      for (int j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
  }
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) { return a.c_ == b.c_; }

 private:
  static int check(int order) {
    if (order < 0) throw InvalidArgument("series: negative truncation order");
    return order;
  }
  void same_order(const TruncatedSeries& o) const {
    if (o.order() != order())
      throw InvalidArgument("series: truncation mismatch (" + std::to_string(order()) + " vs " +
                            std::to_string(o.order()) + ")");
  }
  std::vector<T> c_;
};

template <class T>
TruncatedSeries<T> reciprocal(const TruncatedSeries<T>& s) {
  if (s[0] == T(0)) throw InvalidArgument("series reciprocal: zero constant term");
  const int n = s.order();
  TruncatedSeries<T> r(n);
  r[0] = T(1) / s[0];
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += s[j] * r[k - j];
    r[k] = -acc / s[0];
  }
  return r;
}

/// d/dr, truncated one order lower.
template <class T>
TruncatedSeries<T> derive(const TruncatedSeries<T>& s) {
  if (s.order() == 0) return TruncatedSeries<T>(0);
  TruncatedSeries<T> r(s.order() - 1);
  for (int k = 1; k <= s.order(); ++k) r[k - 1] = s[k] * T(k);
  return r;
}

/// Antiderivative with zero constant term, one order higher.
template <class T>
TruncatedSeries<T> integrate(const TruncatedSeries<T>& s) {
  TruncatedSeries<T> r(s.order() + 1);
  for (int k = 0; k <= s.order(); ++k) r[k + 1] = s[k] / T(k + 1);
  return r;
}

/// outer(inner(r)); inner must have zero constant term.
template <class T>
TruncatedSeries<T> compose(const TruncatedSeries<T>& outer, const TruncatedSeries<T>& inner) {
  if (inner[0] != T(0)) throw InvalidArgument("series compose: inner series must have zero constant term");
  const int n = inner.order();
  TruncatedSeries<T> r = TruncatedSeries<T>::constant(outer.order() >= 0 ? outer[outer.order()] : T(0), n);
  for (int k = outer.order() - 1; k >= 0; --k) {
    r = r * inner;
    r[0] += outer[k];
  }
  return r;
}

template <class T>
TruncatedSeries<T> sqrt(const TruncatedSeries<T>& s) {
  const int n = s.order();
  TruncatedSeries<T> r(n);
  r[0] = detail::exact_sqrt(s[0]);
  for (int k = 1; k <= n; ++k) {
    T acc = s[k];
    for (int j = 1; j < k; ++j) acc -= r[j] * r[k - j];
    r[k] = acc / (T(2) * r[0]);
  }
  return r;
}

/// exp; rational mode requires a zero constant term.
template <class T>
TruncatedSeries<T> exp(const TruncatedSeries<T>& s) {
  const int n = s.order();
  TruncatedSeries<T> r(n);
  if constexpr (std::is_floating_point_v<T>) {
    r[0] = std::exp(s[0]);
  } else {
    if (s[0] != T(0)) throw InvalidArgument("series exp: nonzero constant term in exact mode");
    r[0] = T(1);
  }
  // r' = s' r
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += T(j) * s[j] * r[k - j];
    r[k] = acc / T(k);
  }
  return r;
}

/// log; rational mode requires constant term 1.
template <class T>
TruncatedSeries<T> log(const TruncatedSeries<T>& s) {
  const int n = s.order();
  if (!(s[0] > T(0))) throw InvalidArgument("series log: constant term must be positive");
  TruncatedSeries<T> r(n);
  if constexpr (std::is_floating_point_v<T>) {
    r[0] = std::log(s[0]);
  } else {
    if (s[0] != T(1)) throw InvalidArgument("series log: constant term must be 1 in exact mode");
  }
  // s r' = s'
  for (int k = 1; k <= n; ++k) {
    T acc = T(k) * s[k];
    for (int j = 1; j < k; ++j) acc -= T(j) * r[j] * s[k - j];
    r[k] = acc / (T(k) * s[0]);
  }
  return r;
}

/// s^alpha for a positive constant term (float mode).
inline TruncatedSeries<double> pow(const TruncatedSeries<double>& s, double alpha) {
  return exp(log(s) * alpha);
}

/// s / r^k; the first k coefficients must vanish. The result has order N - k.
template <class T>
TruncatedSeries<T> divide_by_power(const TruncatedSeries<T>& s, int k) {
  if (k > s.order()) throw OrderExceeded("series: division by r^k beyond truncation");
  for (int j = 0; j < k; ++j)
    if (s[j] != T(0)) throw InvalidArgument("series: division by r^k with nonzero low-order coefficient");
  TruncatedSeries<T> r(s.order() - k);
  for (int j = k; j <= s.order(); ++j) r[j - k] = s[j];
  return r;
}

/// r^v * unit(r), with `unit` known to relative order N. Used for f^-1 = r^-2 (1 + ...)^-1.
template <class T>
struct LaurentSeries {
  int valuation = 0;
  TruncatedSeries<T> unit;

  /// Highest power of r whose coefficient is known.
  int precision() const { return valuation + unit.order(); }
  T coeff(int k) const {
    if (k < valuation) return T(0);
    return unit.coeff(k - valuation);
  }

  static LaurentSeries factor(const TruncatedSeries<T>& s) {
    const int v = s.valuation();
    if (v > s.order()) throw InvalidArgument("series: cannot factor a series that vanishes to its truncation order");
    return {v, divide_by_power(s, v)};
  }

  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    const int n = std::min(a.unit.order(), b.unit.order());
    return {a.valuation + b.valuation, a.unit.truncated(n) * b.unit.truncated(n)};
  }
  friend LaurentSeries operator*(const T& s, LaurentSeries a) {
    a.unit *= s;
    return a;
  }
  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    const int v = std::min(a.valuation, b.valuation);
    const int prec = std::min(a.precision(), b.precision());
    TruncatedSeries<T> u(prec - v);
    for (int k = v; k <= prec; ++k) u[k - v] = a.coeff(k) + b.coeff(k);
    return {v, u};
  }
  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (T(-1) * b); }
};

template <class T>
LaurentSeries<T> reciprocal(const LaurentSeries<T>& s) {
  return {-s.valuation, reciprocal(s.unit)};
}

/// d/dr of r^v u(r) = r^(v-1) (v u + r u').
template <class T>
LaurentSeries<T> derive(const LaurentSeries<T>& s) {
  const int n = s.unit.order();
  TruncatedSeries<T> u(n);
  for (int k = 0; k <= n; ++k) u[k] = s.unit[k] * T(s.valuation + k);
  return {s.valuation - 1, u};
}

// ---------------------------------------------------------------------------
// Fitting sampled densities.

struct RadialFit {
  int m = 0;
  int order = 0;
  std::vector<double> H;  // H[k] for k = 0..order; H[0] = H[1] = 0
  double residual_rms = 0.0;
  double residual_max = 0.0;
  double condition = 0.0;
  double r_max = 0.0;
  /// |H_k(full) - H_k(refit on r <= r_max/2)|, empty unless a refit was possible.
  std::vector<double> refit_delta;
};

struct FitOptions {
  double max_condition = 1e13;
  bool refit = true;
};

/// Least-squares fit of Θ/r^(m-1) - 1 = sum_{k=2}^{order} H_k r^k.
RadialFit fit_radial_expansion(std::span<const double> r, std::span<const double> theta, int m, int order,
                               const FitOptions& options = {});

/// Same fit from y_i = Θ/r^(m-1) - 1 supplied directly.
RadialFit fit_density_deviation(std::span<const double> r, std::span<const double> y, int order,
                                const FitOptions& options = {});

/// Radii for fitting: n Chebyshev-Lobatto-distributed points in (0, r_max] skipping r = 0.
std::vector<double> fit_radii(double r_max, int n);

}  // namespace hml
