#include <doctest.h>

#include <cmath>
#include <vector>

#include "hml/catalog.hpp"
#include "hml/errors.hpp"
#include "hml/geodesic.hpp"
#include "hml/sampling.hpp"

using namespace hml;

namespace {

ChartMetric warped(int m) {
  return ChartMetric(
      "warped", m, [](std::span<const double>) { return true; },
      [m](std::span<const Jet> x) {
        const Jet phi = 0.3 * x[0] + 0.2 * x[1] * x[2] + 0.1 * sin(x[0] * x[1]);
        const Jet e = exp(2.0 * phi);
        std::vector<Jet> g;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) g.push_back(i == j ? e : 0.0 * e);
        return g;
      });
}

// exp_P(ξ) with ξ given in a g(P)-orthonormal basis.
Vector exp_map(const ChartMetric& metric, const Point& P, const Matrix& basis, const Vector& xi) {
  const double r = xi.norm();
  const Vector dir = basis * (xi / r);
  const auto s = shoot(metric, P, dir, r);
  return Eigen::Map<const Vector>(s.endpoint.data(), static_cast<Eigen::Index>(s.endpoint.size()));
}

}  // namespace

TEST_SUITE("geodesic") {
  TEST_CASE("density equals the volume distortion of the exponential map") {
    const ChartMetric metric = warped(3);
    const Point P{0.1, 0.2, -0.1};
    const Matrix g = metric.value(P);
    const Matrix basis = cholesky_lower(g).transpose().inverse();  // columns g-orthonormal
    for (const Vector& u : sphere_directions(3, 3)) {
      const double r = 0.6;
      const Vector xi = r * u;
      Matrix D(3, 3);
      const double h = 1e-4;
      for (int k = 0; k < 3; ++k) {
        Vector e = Vector::Zero(3);
        e(k) = h;
        D.col(k) = (-exp_map(metric, P, basis, xi + 2 * e) + 8 * exp_map(metric, P, basis, xi + e) -
                    8 * exp_map(metric, P, basis, xi - e) + exp_map(metric, P, basis, xi - 2 * e)) /
                   (12 * h);
      }
      const auto s = shoot(metric, P, basis * u, r);
      const Matrix gx = metric.value(s.endpoint);
      const double expected = std::sqrt((D.transpose() * gx * D).determinant());
      CHECK(s.theta / (r * r) == doctest::Approx(expected).epsilon(1e-7));
    }
  }

  TEST_CASE("sphere: Θ = sin^(m-1) r and Ξ = (m-1) cot r in any direction") {
    const CatalogEntry e = catalog::sphere(4);
    const Point P{0.3, -0.2, 0.1, 0.4};
    for (const Vector& dir : unit_directions(e.metric.value(P), 4)) {
      const auto prof = shoot_profile(e.metric, P, dir, {0.5, 1.0, 2.0});
      for (const auto& s : prof) {
        CHECK(s.theta == doctest::Approx(std::pow(std::sin(s.r), 3)).epsilon(1e-11));
        CHECK(s.xi == doctest::Approx(3 / std::tan(s.r)).epsilon(1e-10));
        // Ξ' = -(m-1)/sin^2 r
        CHECK(s.xi_prime == doctest::Approx(-3 / std::pow(std::sin(s.r), 2)).epsilon(1e-9));
        CHECK(std::abs(s.speed_drift) < 1e-10);
      }
    }
  }

  TEST_CASE("sphere distance spheres are umbilic with L = cot r") {
    const CatalogEntry e = catalog::sphere(3, "normal");
    const Vector dir = unit_directions(e.metric.value(e.center), 1).front();
    const SphereShapeSample s = second_fundamental_form(e.metric, e.center, dir, 0.8);
    CHECK(s.umbilicity_defect < 1e-10);
    CHECK(s.asymmetry < 1e-10);
    for (int a = 0; a < 2; ++a) CHECK(s.L(a, a) == doctest::Approx(1 / std::tan(0.8)).epsilon(1e-10));
    CHECK(s.jacobi_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.jacobi_max == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("Fubini-Study eigen spread at the center is 3") {
    const CatalogEntry e = catalog::fubini_study(2, "normal");
    const EigenSpread s = eigen_spread(e.metric, e.center, 32);
    CHECK(s.s == doctest::Approx(3.0).epsilon(1e-10));
  }

  TEST_CASE("radial harmonic on Euclidean space is -1/r + 1/r0 in dimension 3") {
    const CatalogEntry e = catalog::euclidean(3);
    std::vector<Vector> dirs = unit_directions(e.metric.value(e.center), 5);
    const auto table = density_profile(e.metric, e.center, dirs, linear_radii(0.5, 2.0, 61), {}, 1);
    const auto f = radial_harmonic(table, 0.5);
    for (std::size_t i = 0; i < f.size(); ++i)
      CHECK(f[i] == doctest::Approx(2.0 - 1.0 / table.radii[i]).epsilon(1e-9));
  }

  TEST_CASE("non-radial densities are refused by the radial harmonic") {
    const ChartMetric metric = warped(3);
    const Point P{0.0, 0.0, 0.0};
    const auto table = density_profile(metric, P, unit_directions(metric.value(P), 6), {0.3, 0.6}, {}, 1);
    CHECK_THROWS_AS(radial_harmonic(table, 0.3), NonRadial);
  }

  TEST_CASE("input validation") {
    const CatalogEntry e = catalog::euclidean(3);
    Vector d(3);
    d << 2, 0, 0;
    CHECK_THROWS_AS(shoot(e.metric, e.center, d, 1.0), InvalidArgument);
    d << 1, 0, 0;
    CHECK_THROWS_AS(shoot_profile(e.metric, e.center, d, {0.5, 0.4}), InvalidArgument);
    const CatalogEntry s = catalog::sphere(3, "normal");
    CHECK_THROWS_AS(shoot(s.metric, s.center, d, 3.5), DomainExit);
  }

  TEST_CASE("det(I + M) - 1 keeps relative precision") {
    Matrix M = Matrix::Zero(3, 3);
    M(0, 0) = 1e-12;
    M(1, 1) = 2e-12;
    M(0, 1) = 5e-13;
    CHECK(det_identity_plus_minus_one(M) == doctest::Approx(3e-12).epsilon(1e-9));
  }
}
