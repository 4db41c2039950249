#include <doctest.h>

#include <cmath>
#include <vector>

#include "hml/errors.hpp"
#include "hml/series.hpp"

using namespace hml;
using RS = TruncatedSeries<Rational>;

namespace {
Rational fact(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}
}  // namespace

TEST_SUITE("series") {
  TEST_CASE("geometric series and reciprocal") {
    const RS one_minus = RS::constant(1, 8) - RS::monomial(1, 8);
    const RS inv = reciprocal(one_minus);
    for (int k = 0; k <= 8; ++k) CHECK(inv[k] == 1);
    CHECK(one_minus * inv == RS::constant(1, 8));
  }

  TEST_CASE("exp and log are inverse with exact coefficients") {
    const RS x = RS::monomial(1, 10);
    const RS e = exp(x);
    for (int k = 0; k <= 10; ++k) CHECK(e[k] == Rational(1) / fact(k));
    CHECK(log(e) == x);
  }

  TEST_CASE("sqrt of a rational square") {
    const RS s = RS::constant(Rational(9, 4), 6) + RS::monomial(2, 6);
    const RS r = sqrt(s);
    CHECK(r * r == s);
    CHECK(r[0] == Rational(3, 2));
    CHECK_THROWS_AS(sqrt(RS::constant(2, 4)), InvalidArgument);
  }

  TEST_CASE("(sin r / r)^2 from the sine series") {
    // sin r / r = Σ (-1)^k r^(2k) / (2k+1)!
    RS sinc(10);
    for (int k = 0; 2 * k <= 10; ++k) sinc[2 * k] = Rational(k % 2 ? -1 : 1) / fact(2 * k + 1);
    const RS sq = sinc * sinc;
    CHECK(sq[2] == Rational(-1, 3));
    CHECK(sq[4] == Rational(2, 45));
    CHECK(sq[6] == Rational(-1, 315));
    CHECK(sq[8] == Rational(2, 14175));
  }

  TEST_CASE("derive and integrate round trip and orders") {
    RS p(5);
    for (int k = 0; k <= 5; ++k) p[k] = Rational(k + 1, 3);
    const RS q = integrate(derive(p));
    CHECK(q.order() == 5);
    for (int k = 1; k <= 5; ++k) CHECK(q[k] == p[k]);
    CHECK(q[0] == 0);
  }

  TEST_CASE("mixed truncation orders are refused") {
    CHECK_THROWS_AS(RS::constant(1, 3) * RS::constant(1, 4), InvalidArgument);
    CHECK_THROWS_AS(RS::constant(1, 3).coeff(4), OrderExceeded);
  }

  TEST_CASE("divide_by_power and Laurent reciprocal") {
    const RS s = RS::monomial(2, 6) + RS::monomial(3, 6, Rational(2));
    const RS d = divide_by_power(s, 2);
    CHECK(d[0] == 1);
    CHECK(d[1] == 2);
    CHECK_THROWS(divide_by_power(s, 3));
  }

  TEST_CASE("fit recovers a known radial expansion") {
    const int m = 3;
    const std::vector<double> H{0, 0, -0.2, 0.05, 0.01, 0, -0.003};
    const auto r = fit_radii(0.5, 40);
    std::vector<double> theta;
    for (double x : r) {
      double y = 1;
      for (int k = 2; k < static_cast<int>(H.size()); ++k) y += H[static_cast<std::size_t>(k)] * std::pow(x, k);
      theta.push_back(std::pow(x, m - 1) * y);
    }
    const RadialFit fit = fit_radial_expansion(r, theta, m, 8);
    for (int k = 2; k <= 6; ++k) CHECK(fit.H[static_cast<std::size_t>(k)] == doctest::Approx(H[static_cast<std::size_t>(k)]).epsilon(1e-8));
    CHECK(std::abs(fit.H[7]) < 1e-7);
    CHECK(fit.residual_max < 1e-12);
  }

  TEST_CASE("fit radii lie in (0, r_max] and increase") {
    const auto r = fit_radii(0.4, 16);
    CHECK(r.front() > 0.0);
    CHECK(r.back() == doctest::Approx(0.4));
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
  }
}
