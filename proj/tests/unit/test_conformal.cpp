#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hml/catalog.hpp"
#include "hml/conformal.hpp"
#include "hml/curvature.hpp"
#include "hml/errors.hpp"
#include "hml/geodesic.hpp"
#include "hml/sampling.hpp"

using namespace hml;

TEST_SUITE("conformal") {
  TEST_CASE("ψ = 1 + t gives ř = arctan r") {
    const auto rep = reparametrize(RadialFunction::polynomial({1.0, 1.0}), 3.0);
    for (double r : {0.1, 0.7, 1.5, 3.0}) {
      CHECK(rep.forward(r) == doctest::Approx(std::atan(r)).epsilon(1e-12));
      CHECK(rep.inverse(std::atan(r)) == doctest::Approx(r).epsilon(1e-11));
      CHECK(rep.forward_derivative(r) == doctest::Approx(1 / (1 + r * r)).epsilon(1e-14));
    }
  }

  TEST_CASE("constant ψ is a dilation") {
    const auto rep = reparametrize(RadialFunction::constant(2.0), 1.0);
    CHECK(rep.forward(0.6) == doctest::Approx(0.3));
    CHECK(rep.rc_max() == doctest::Approx(0.5));
  }

  TEST_CASE("ψ vanishing inside the range is refused with its location") {
    try {
      (void)reparametrize(RadialFunction::polynomial({1.0, -1.0}), 1.5);
      FAIL("expected a refusal");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("r ≈ 1") != std::string::npos);
    }
  }

  TEST_CASE("Euclidean space with ψ = (1 + t)/2 becomes the unit sphere") {
    const CatalogEntry e = catalog::euclidean(3);
    const ChartMetric g = deform_metric(e.metric, RadialFunction::polynomial({0.5, 0.5}));
    for (const Point& x : {Point{0.0, 0.0, 0.0}, Point{0.4, -0.3, 0.2}, Point{1.2, 0.5, -0.8}}) {
      const CurvatureBundle cb = curvature(g, x);
      CHECK(cb.scalar == doctest::Approx(6.0).epsilon(1e-11));
      CHECK(einstein_defect(cb) < 1e-11);
    }
  }

  TEST_CASE("a generic radial ψ does not give constant curvature") {
    const CatalogEntry e = catalog::euclidean(3);
    const ChartMetric g = deform_metric(e.metric, RadialFunction::polynomial({1.0, 0.0, 1.0}));
    const double s0 = curvature(g, Point{0.0, 0.0, 0.0}).scalar;
    const double s1 = curvature(g, Point{0.5, 0.3, 0.0}).scalar;
    CHECK(std::abs(s0 - s1) > 1e-3);
  }

  TEST_CASE("conformal Ricci formula agrees with the deformed metric") {
    const CatalogEntry e = catalog::sphere(3);
    const RadialFunction psi = RadialFunction::polynomial({1.0, 0.3, -0.1});
    const ScalarField Psi = radial_scalar_field(e.metric, psi);
    const ChartMetric g = conformal_rescale(e.metric, Psi);
    const Point x{0.2, -0.1, 0.3};
    CHECK((ricci_conformal(e.metric, Psi, x) - curvature(g, x).ricci).norm() < 1e-11);
  }

  TEST_CASE("constant ψ leaves the Ricci tensor unchanged") {
    const CatalogEntry e = catalog::fubini_study(2, "normal");
    const ChartMetric g = deform_metric(e.metric, RadialFunction::constant(3.0));
    const Point x{0.1, 0.2, -0.1, 0.05};
    CHECK((curvature(g, x).ricci - curvature(e.metric, x).ricci).norm() < 1e-12);
  }

  TEST_CASE("density law predicts the density of g_ψ") {
    const CatalogEntry e = catalog::sphere(3, "normal");
    const RadialFunction psi = RadialFunction::polynomial({1.0, 0.2, 0.05});
    const auto dirs = unit_directions(e.metric.value(e.center), 3);
    const DensityLawCheck chk = density_law_check(e.metric, psi, dirs, {0.3, 0.6, 0.9}, {}, 1);
    CHECK(chk.max_relative_error < 1e-9);
  }

  TEST_CASE("the trivial-density factor solves its defining relation") {
    const CatalogEntry e = catalog::sphere(3, "normal");
    const int m = 3;
    const RadialFunction psi = trivial_density_factor(*e.facts.reduced_density, m);
    const auto rep = reparametrize(psi, 1.5);
    for (double r : {0.2, 0.8, 1.5}) {
      const double rc = rep.forward(r);
      const double rhs = std::pow(psi(r * r), 1 - m) * std::pow(r, m - 1) * (*e.facts.reduced_density)(r * r);
      CHECK(std::pow(rc, m - 1) == doctest::Approx(rhs).epsilon(1e-10));
    }
    const auto dirs = unit_directions(e.metric.value(e.center), 2);
    const DensityLawCheck chk = density_law_check(e.metric, psi, dirs, {0.5, 1.0}, {}, 1);
    CHECK(chk.max_reduced_deviation < 1e-8);
  }

  TEST_CASE("density-root factor is the (m-1)-th root of the reduced density") {
    const RadialFunction rd = fubini_study_reduced_density(4);
    const RadialFunction psi = density_root_factor(rd, 4);
    for (double r : {0.3, 1.0, 1.4}) {
      const double expected = std::sin(r) / r * std::cbrt(std::cos(r));
      CHECK(psi(r * r) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("power-law fit recovers synthetic data") {
    std::vector<double> u, v;
    for (int i = 0; i < 20; ++i) {
      const double x = 1e-4 * std::pow(100.0, i / 19.0);
      u.push_back(x);
      v.push_back(-0.7 * std::pow(x, -1.25) * (1 + 0.4 * x));
    }
    const PowerLawFit f = fit_power_law(u, v);
    CHECK(f.c == doctest::Approx(-0.7).epsilon(1e-9));
    CHECK(f.p == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(f.d == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(f.residual < 1e-12);
  }

  TEST_CASE("space form inversion and scaling isometries") {
    const IsometryReport rep = space_form_isometry_check(0.5, 0.5, {{0.3, 0.1, -0.2}, {-0.5, 0.4, 0.6}});
    CHECK(rep.inversion_deviation < 1e-12);
    CHECK(rep.scaling_deviation < 1e-12);
  }

  TEST_CASE("charts without a radial variable are refused") {
    CHECK_THROWS_AS(deform_metric(catalog::two_d_family(4, 0.1).metric.with_radial_variable(std::nullopt),
                                  RadialFunction::constant(1.0)),
                    InvalidArgument);
  }
}
