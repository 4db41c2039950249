#include <doctest.h>

#include <cmath>
#include <vector>

#include "hml/catalog.hpp"
#include "hml/curvature.hpp"
#include "hml/errors.hpp"

using namespace hml;

namespace {

// g_ij = exp(2φ) δ_ij with a generic φ; not centrally harmonic anywhere in particular.
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

// Fourth-order central difference of g along coordinate l.
Matrix dg(const ChartMetric& metric, std::vector<double> x, int l, double h) {
  auto at = [&](double s) {
    std::vector<double> y = x;
    y[static_cast<std::size_t>(l)] += s;
    return metric.value(y);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("Christoffel symbols match the Koszul formula by finite differences") {
    const ChartMetric metric = warped(3);
    const std::vector<double> x{0.2, -0.4, 0.7};
    const int m = 3;
    std::vector<Matrix> d;
    for (int l = 0; l < m; ++l) d.push_back(dg(metric, x, l, 1e-3));
    const Matrix ginv = metric.value(x).inverse();
    const auto gamma = christoffels(metric, x);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          double v = 0;
          for (int l = 0; l < m; ++l) v += 0.5 * ginv(k, l) * (d[i](j, l) + d[j](i, l) - d[l](i, j));
          CHECK(gamma[static_cast<std::size_t>((i * m + j) * m + k)] == doctest::Approx(v).epsilon(1e-9));
        }
  }

  TEST_CASE("space forms have sectional curvature 4ab in every plane") {
    for (auto [a, b] : {std::pair{1.0, 0.25}, std::pair{0.5, -0.5}, std::pair{2.0, 0.3}}) {
      const CatalogEntry e = catalog::space_form(a, b, 4);
      const std::vector<double> x{0.1, -0.2, 0.15, 0.05};
      const CurvatureBundle cb = curvature(e.metric, x);
      Vector u(4), v(4), w(4);
      u << 1, 0.3, -0.2, 0.5;
      v << -0.4, 1, 0.1, 0.2;
      w << 0.2, 0.2, 1, -0.7;
      CHECK(sectional_curvature(cb, u, v) == doctest::Approx(4 * a * b).epsilon(1e-12));
      CHECK(sectional_curvature(cb, u, w) == doctest::Approx(4 * a * b).epsilon(1e-12));
      CHECK(einstein_defect(cb) < 1e-12);
    }
  }

  TEST_CASE("round sphere: R(u,v,v,u) = +1 for orthonormal u, v") {
    const CatalogEntry e = catalog::sphere(3);
    const std::vector<double> x{0.0, 0.0, 0.0};
    const CurvatureBundle cb = curvature(e.metric, x);
    const double s = std::sqrt(cb.metric(0, 0));
    Vector u = Vector::Zero(3), v = Vector::Zero(3);
    u(0) = 1 / s;
    v(1) = 1 / s;
    CHECK(contract_riemann(cb.riemann, 3, u, v, v, u) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(cb.scalar == doctest::Approx(6.0).epsilon(1e-13));
  }

  TEST_CASE("covariant Hessian matches finite differences") {
    const ChartMetric metric = warped(3);
    const ScalarField phi("phi", [](std::span<const Jet> x) { return x[0] * x[0] * x[1] + exp(x[2]); });
    const std::vector<double> x{0.3, 0.1, -0.2};
    const Matrix H = hessian(metric, phi, x);
    const auto gamma = christoffels(metric, x);
    const double h = 1e-3;
    auto f = [&](std::vector<double> y) { return phi.value(y); };
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        auto shifted = [&](double si, double sj) {
          std::vector<double> y = x;
          y[static_cast<std::size_t>(i)] += si;
          y[static_cast<std::size_t>(j)] += sj;
          return f(y);
        };
        const double dij = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4 * h * h);
        double corr = 0;
        for (int k = 0; k < 3; ++k) {
          std::vector<double> yp = x, ym = x;
          yp[static_cast<std::size_t>(k)] += h;
          ym[static_cast<std::size_t>(k)] -= h;
          corr += gamma[static_cast<std::size_t>((i * 3 + j) * 3 + k)] * (f(yp) - f(ym)) / (2 * h);
        }
        CHECK(H(i, j) == doctest::Approx(dij - corr).epsilon(1e-5));
      }
  }

  TEST_CASE("curvature symmetries on a generic metric") {
    const ChartMetric metric = warped(3);
    const std::vector<double> x{0.2, -0.4, 0.7};
    const CurvatureBundle cb = curvature(metric, x, 1);
    double scale = 0, worst = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            scale = std::max(scale, std::abs(cb.R(i, j, k, l)));
            worst = std::max({worst, std::abs(cb.R(i, j, k, l) + cb.R(j, i, k, l)),
                              std::abs(cb.R(i, j, k, l) - cb.R(k, l, i, j)),
                              std::abs(cb.R(i, j, k, l) + cb.R(j, k, i, l) + cb.R(k, i, j, l))});
          }
    CHECK(scale > 1e-2);
    CHECK(worst < 1e-13 * scale);
    const auto [div, half_ds] = contracted_bianchi(cb);
    CHECK((div - half_ds).norm() < 1e-11);
  }

  TEST_CASE("degenerate planes and unavailable orders are refused") {
    const CatalogEntry e = catalog::sphere(3);
    const std::vector<double> x{0.1, 0.0, 0.0};
    const CurvatureBundle cb = curvature(e.metric, x, 1);
    Vector u(3);
    u << 1, 2, 3;
    CHECK_THROWS_AS(sectional_curvature(cb, u, 2.0 * u), DegeneratePlane);
    CHECK_THROWS_AS(cb.nabla(2), OrderExceeded);
    CHECK_THROWS_AS(curvature(e.metric, x, 20), OrderExceeded);
  }
}
