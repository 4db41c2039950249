#include <doctest.h>

#include <cmath>
#include <vector>

#include "hml/errors.hpp"
#include "hml/jet.hpp"
#include "hml/radial_function.hpp"

using namespace hml;

TEST_SUITE("jet") {
  TEST_CASE("partials of exp(x y) + sin(x) at a point") {
    const std::vector<double> p{0.3, -0.7};
    const auto x = Jet::variables(p, 4);
    const Jet f = exp(x[0] * x[1]) + sin(x[0]);
    const double a = p[0], b = p[1], e = std::exp(a * b);
    CHECK(f.value() == doctest::Approx(e + std::sin(a)).epsilon(1e-15));
    CHECK(f.d(0) == doctest::Approx(b * e + std::cos(a)).epsilon(1e-14));
    CHECK(f.d(1) == doctest::Approx(a * e).epsilon(1e-14));
    CHECK(f.d(0, 0) == doctest::Approx(b * b * e - std::sin(a)).epsilon(1e-14));
    CHECK(f.d(0, 1) == doctest::Approx((1 + a * b) * e).epsilon(1e-14));
    const int mi[2] = {2, 2};
    // ∂x²∂y² exp(xy) = (2 + 4xy + x²y²) exp(xy)
    CHECK(f.partial(mi) == doctest::Approx((2 + 4 * a * b + a * a * b * b) * e).epsilon(1e-13));
  }

  TEST_CASE("lower orders are prefixes of higher ones") {
    const std::vector<double> p{0.1, 0.2, 0.3};
    const auto x8 = Jet::variables(p, 8);
    const auto x3 = Jet::variables(p, 3);
    const Jet f8 = reciprocal(1.0 + x8[0] * x8[0] + x8[1] * x8[2]);
    const Jet f3 = reciprocal(1.0 + x3[0] * x3[0] + x3[1] * x3[2]);
    REQUIRE(f3.coeffs().size() <= f8.coeffs().size());
    for (std::size_t i = 0; i < f3.coeffs().size(); ++i) CHECK(f3.coeffs()[i] == doctest::Approx(f8.coeffs()[i]));
  }

  TEST_CASE("univariate Taylor coefficients of elementary functions") {
    const Jet t = Jet::variable(1, 10, 0, 0.4);
    const Jet s = sqrt(t), l = log(t), p = pow(t, 2.5);
    // d^n/dt^n t^α = α(α-1)...(α-n+1) t^(α-n)
    auto falling = [](double a, int n) {
      double r = 1;
      for (int k = 0; k < n; ++k) r *= a - k;
      return r;
    };
    for (int n = 0; n <= 10; ++n) {
      const int mi[1] = {n};
      CHECK(s.partial(mi) == doctest::Approx(falling(0.5, n) * std::pow(0.4, 0.5 - n)).epsilon(1e-12));
      CHECK(p.partial(mi) == doctest::Approx(falling(2.5, n) * std::pow(0.4, 2.5 - n)).epsilon(1e-12));
      if (n > 0) {
        // d^n log t = (-1)^(n-1) (n-1)! t^-n
        double fact = 1;
        for (int k = 2; k < n; ++k) fact *= k;
        CHECK(l.partial(mi) == doctest::Approx((n % 2 ? 1 : -1) * fact * std::pow(0.4, -n)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("integer powers at zero") {
    const Jet t = Jet::variable(1, 6, 0, 0.0);
    const Jet p = pow(t, 3.0);
    const int mi[1] = {3};
    CHECK(p.partial(mi) == doctest::Approx(6.0));
    CHECK_THROWS(pow(t, 0.5).value());
  }

  TEST_CASE("orders above the supported maximum are refused") {
    CHECK_THROWS(Jet::variable(1, kMaxJetOrder + 1, 0, 0.0));
  }

  TEST_CASE("sinc and cosine of sqrt t on both sides of zero") {
    for (double t : {-2.0, -0.3, 0.0, 0.2, 1.7, 6.0}) {
      const Jet j = Jet::variable(1, 3, 0, t);
      const double r = std::sqrt(std::abs(t));
      const double sinc = t > 0 ? std::sin(r) / r : t < 0 ? std::sinh(r) / r : 1.0;
      const double cs = t >= 0 ? std::cos(r) : std::cosh(r);
      CHECK(sinc_sqrt(j).value() == doctest::Approx(sinc).epsilon(1e-14));
      CHECK(cos_sqrt(j).value() == doctest::Approx(cs).epsilon(1e-14));
    }
    // d/dt cos(sqrt t) = -sin(sqrt t) / (2 sqrt t), by central differences
    const double t = 1.3, h = 1e-5;
    const Jet j = Jet::variable(1, 1, 0, t);
    const double fd = (std::cos(std::sqrt(t + h)) - std::cos(std::sqrt(t - h))) / (2 * h);
    CHECK(cos_sqrt(j).d(0) == doctest::Approx(fd).epsilon(1e-8));
  }
}
