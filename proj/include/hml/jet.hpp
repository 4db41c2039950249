#pragma once

// Truncated multivariate Taylor polynomials ("jets") for Taylor-mode forward
// differentiation. A jet of order K in n variables stores the coefficients of
//   f(x0 + h) = sum_{|a| <= K} c_a h^a
// so c_a = (d^a f)(x0) / a!. Monomials are stored in graded order: every
// degree-d block precedes degree d+1, and the ordering inside a block does not
// depend on K. Lower-order jets are therefore prefixes of higher-order ones.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hml {

/// Largest supported total derivative order.
inline constexpr int kMaxJetOrder = 12;

class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs;
    std::uint32_t rhs;
    std::uint32_t out;
  };
  struct DerivativeTerm {
    std::uint32_t src;
    std::uint32_t dst;
    double factor;
  };

  /// Shared, immutable layout for `nvars` variables; thread safe.
  static const JetLayout& get(int nvars);

  int nvars() const noexcept { return nvars_; }
  std::size_t size(int order) const { return block_end_[static_cast<std::size_t>(order)]; }
  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exps_.data() + idx * static_cast<std::size_t>(nvars_), static_cast<std::size_t>(nvars_)};
  }
  std::size_t index(std::span<const int> exps) const;

  /// All (i, j) monomial pairs with deg i + deg j <= order, and the index of their product.
  std::span<const Product> products(int order) const;
  /// Terms of d/dh_var for a jet of the given order.
  std::span<const DerivativeTerm> derivative_terms(int var, int order) const;

 private:
  explicit JetLayout(int nvars);

  int nvars_;
  std::vector<std::uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<std::size_t> block_end_;
  std::vector<std::uint64_t> keys_;  // sorted copy for lookup
  std::vector<std::uint32_t> key_index_;

  struct Lazy;
  Lazy* lazy_;
};

class Jet {
 public:
  Jet() = default;
  Jet(int nvars, int order);

  static Jet constant(int nvars, int order, double value);
  static Jet variable(int nvars, int order, int var, double value);
  /// Independent variables x_i = point_i + h_i.
  static std::vector<Jet> variables(std::span<const double> point, int order);

  int nvars() const noexcept { return layout_ ? layout_->nvars() : 0; }
  int order() const noexcept { return order_; }
  double value() const { return c_[0]; }
  std::span<const double> coeffs() const { return c_; }
  std::span<double> coeffs() { return c_; }
  double coeff(std::size_t idx) const { return c_[idx]; }
  const JetLayout& layout() const { return *layout_; }

  /// Partial derivative of the represented function at x0 for a multi-index.
  double partial(std::span<const int> multi_index) const;
  double d(int i) const;
  double d(int i, int j) const;

  Jet truncated(int order) const;
  /// d/dh_var; the result has order() - 1.
  Jet derivative(int var) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);
  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

 private:
  const JetLayout* layout_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

/// f(x) where `taylor[n] = f^(n)(x.value()) / n!`; only the first order()+1 entries are used.
Jet compose(const Jet& x, std::span<const double> taylor);

Jet reciprocal(const Jet& x);
Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet pow(const Jet& x, double exponent);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet square(const Jet& x);

/// Sum of the jets' values weighted, used in tensor contractions.
Jet dot(std::span<const Jet> a, std::span<const Jet> b);

}  // namespace hml
