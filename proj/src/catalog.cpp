#include "hml/catalog.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "hml/errors.hpp"
#include "hml/radial_function.hpp"

namespace hml {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int integer_param(const CatalogParams& p, const std::string& key, const std::string& family) {
  const auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument(family + ": missing parameter '" + key + "'");
  const double v = it->second;
  if (v != std::floor(v) || std::abs(v) > 1e6) throw InvalidArgument(family + ": '" + key + "' must be an integer");
  return static_cast<int>(v);
}

double real_param(const CatalogParams& p, const std::string& key, const std::string& family) {
  const auto it = p.find(key);
  if (it == p.end()) throw InvalidArgument(family + ": missing parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw InvalidArgument(family + ": '" + key + "' must be finite");
  return it->second;
}

void allow_only(const CatalogParams& p, std::initializer_list<const char*> keys, const std::string& family) {
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : p)
    if (!ok.count(k)) throw InvalidArgument(family + ": unknown parameter '" + k + "'");
}

void check_dim(int m, const std::string& family, int lo = 2) {
  if (m < lo || m > 12) throw InvalidArgument(family + ": dimension must be in [" + std::to_string(lo) + ", 12]");
}

std::vector<Jet> diagonal(std::span<const Jet> x, const Jet& s) {
  const std::size_t m = x.size();
  std::vector<Jet> g;
  g.reserve(m * m);
  const Jet zero = Jet::constant(s.nvars(), s.order(), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) g.push_back(i == j ? s : zero);
  return g;
}

double sn_power(double kappa, double r, int p) {
  double s;
  if (kappa > 0) s = std::sin(std::sqrt(kappa) * r) / std::sqrt(kappa);
  else if (kappa < 0) s = std::sinh(std::sqrt(-kappa) * r) / std::sqrt(-kappa);
  else s = r;
  return std::pow(s, p);
}

}  // namespace

std::vector<Jet> rotational_components(std::span<const Jet> x, const Jet& alpha, const Jet& beta,
                                       const std::optional<Jet>& gamma) {
  const std::size_t m = x.size();
  std::vector<Jet> jx;
  if (gamma) {
    jx.resize(m);
    for (std::size_t k = 0; k + 1 < m; k += 2) {
      jx[k] = -x[k + 1];
      jx[k + 1] = x[k];
    }
  }
  std::vector<Jet> g(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      Jet v = beta * (x[i] * x[j]);
      if (gamma) v += *gamma * (jx[i] * jx[j]);
      if (i == j) v += alpha;
      g[i * m + j] = v;
      if (i != j) g[j * m + i] = std::move(v);
    }
  return g;
}

RadialVariable normal_radius_variable(int m) {
  RadialVariable rv;
  rv.kind = RadialVariable::Kind::NormalRadius;
  rv.center.assign(static_cast<std::size_t>(m), 0.0);
  rv.t_of_x = [](std::span<const Jet> x) { return squared_norm(x); };
  rv.t_of_r = [](const Jet& r) { return r * r; };
  return rv;
}

RadialFunction fubini_study_reduced_density(int m) {
  return RadialFunction(
      "(sin r/r)^" + std::to_string(m - 1) + " cos r",
      [m](const Jet& t) { return pow(sinc_sqrt(t), m - 1.0) * cos_sqrt(t); }, 0.0,
      std::numbers::pi * std::numbers::pi / 4.0);
}

namespace catalog {

CatalogEntry euclidean(int m) {
  check_dim(m, "euclidean", 1);
  ChartMetric metric("euclidean(" + std::to_string(m) + ")", m, nullptr, [](std::span<const Jet> x) {
    return diagonal(x, Jet::constant(x[0].nvars(), x[0].order(), 1.0));
  });
  metric = metric.with_injectivity_radius(std::numeric_limits<double>::infinity())
               .with_radial_variable(normal_radius_variable(m));
  CatalogEntry e{"euclidean", {{"dim", m}}, "normal", metric, Point(static_cast<std::size_t>(m), 0.0), {}};
  e.facts.sectional_curvature = 0.0;
  e.facts.einstein = true;
  e.facts.harmonic_space = true;
  e.facts.harmonic_centers = {e.center};
  e.facts.density = [m](double r) { return std::pow(r, m - 1); };
  e.facts.reduced_density = RadialFunction::constant(1.0);
  e.facts.eigen_spread = 0.0;
  return e;
}

CatalogEntry space_form(double a, double b, int m) {
  check_dim(m, "space_form");
  if (a == 0.0 && b == 0.0) throw InvalidArgument("space_form: (a, b) = (0, 0) is not a metric");
  auto domain = [a, b](std::span<const double> x) {
    double t = 0.0;
    for (double v : x) t += v * v;
    return a + b * t > 0.0;
  };
  ChartMetric metric("g_{" + fmt(a) + "," + fmt(b) + "}(" + std::to_string(m) + ")", m, domain,
                     [a, b](std::span<const Jet> x) { return diagonal(x, pow(a + b * squared_norm(x), -2.0)); });
  const double kappa = 4.0 * a * b;
  Point center(static_cast<std::size_t>(m), 0.0);
  if (a <= 0.0) center[0] = std::sqrt(std::abs(a / b)) + 1.0;  // origin lies outside the domain
  if (kappa > 0 && a > 0) metric = metric.with_injectivity_radius(std::numbers::pi / std::sqrt(kappa));
  else if (a > 0) metric = metric.with_injectivity_radius(std::numeric_limits<double>::infinity());
  CatalogEntry e{"space_form", {{"a", a}, {"b", b}, {"dim", m}}, "conformal", metric, center, {}};
  e.facts.sectional_curvature = kappa;
  e.facts.einstein = true;
  e.facts.harmonic_space = true;
  e.facts.harmonic_centers = {center};
  e.facts.density = [kappa, m](double r) { return sn_power(kappa, r, m - 1); };
  e.facts.reduced_density = RadialFunction(
      "(sn_k(r)/r)^" + std::to_string(m - 1),
      [kappa, m](const Jet& t) { return pow(sinc_sqrt(kappa * t), m - 1.0); }, 0.0,
      kappa > 0 ? std::numbers::pi * std::numbers::pi / kappa : std::numeric_limits<double>::infinity());
  e.facts.eigen_spread = 0.0;
  return e;
}

CatalogEntry sphere(int m, const std::string& chart) {
  check_dim(m, "sphere");
  Point north(static_cast<std::size_t>(m), 0.0), south = north;
  CatalogEntry e{"sphere", {{"dim", m}}, chart, ChartMetric("", m, nullptr, nullptr), {}, {}};
  if (chart == "stereographic") {
    // Projection from an equatorial point, so the poles P± = (±1, 0, ...) both lie in the chart.
    e.metric = ChartMetric("sphere(" + std::to_string(m) + ")", m, nullptr, [](std::span<const Jet> y) {
      return diagonal(y, 4.0 * pow(1.0 + squared_norm(y), -2.0));
    });
    RadialVariable rv;
    rv.kind = RadialVariable::Kind::PoleHeight;
    north[0] = 1.0;
    south[0] = -1.0;
    rv.center = north;
    rv.t_of_x = [](std::span<const Jet> y) {
      const Jet xi1 = 2.0 * y[0] / (1.0 + squared_norm(y));
      return xi1 * xi1;
    };
    rv.t_of_r = [](const Jet& r) {
      const Jet c = cos(r);
      return c * c;
    };
    e.metric = e.metric.with_radial_variable(rv);
    e.center = north;
    e.facts.harmonic_centers = {north, south};
  } else if (chart == "normal") {
    // Geodesic normal coordinates at a pole: g = S^2 I + (1 - S^2)/t x x^T, S = sin r / r.
    e.metric = ChartMetric(
        "sphere(" + std::to_string(m) + ",normal)", m,
        [](std::span<const double> x) {
          double t = 0.0;
          for (double v : x) t += v * v;
          return t < std::numbers::pi * std::numbers::pi;
        },
        [](std::span<const Jet> x) {
          const Jet t = squared_norm(x);
          const Jet s = sinc_sqrt(t);
          return rotational_components(x, s * s, sinc2_complement(t));
        });
    e.metric = e.metric.with_radial_variable(normal_radius_variable(m));
    e.center = north;
    e.facts.harmonic_centers = {north};
  } else {
    throw InvalidArgument("sphere: unknown chart '" + chart + "'");
  }
  e.metric = e.metric.with_injectivity_radius(std::numbers::pi);
  e.facts.sectional_curvature = 1.0;
  e.facts.einstein = true;
  e.facts.harmonic_space = true;
  e.facts.density = [m](double r) { return std::pow(std::sin(r), m - 1); };
  e.facts.reduced_density = RadialFunction(
      "(sin r/r)^" + std::to_string(m - 1), [m](const Jet& t) { return pow(sinc_sqrt(t), m - 1.0); }, 0.0,
      std::numbers::pi * std::numbers::pi);
  e.facts.eigen_spread = 0.0;
  return e;
}

CatalogEntry fubini_study(int complex_dim, const std::string& chart) {
  if (complex_dim < 1 || complex_dim > 6) throw InvalidArgument("fubini_study: complex_dim must be in [1, 6]");
  const int m = 2 * complex_dim;
  const std::string tag = "fubini_study(" + std::to_string(complex_dim);
  CatalogEntry e{"fubini_study", {{"complex_dim", complex_dim}}, chart, ChartMetric("", m, nullptr, nullptr),
                 Point(static_cast<std::size_t>(m), 0.0), {}};
  if (chart == "affine") {
    // Holomorphic sectional curvature 4 on the affine chart z = (x1 + i y1, ...).
    e.metric = ChartMetric(tag + ")", m, nullptr, [m](std::span<const Jet> x) {
      const Jet w = 1.0 + squared_norm(x);
      const Jet inv = reciprocal(w);
      const Jet inv2 = inv * inv;
      std::vector<Jet> p(static_cast<std::size_t>(m)), q(static_cast<std::size_t>(m));
      for (int k = 0; k + 1 < m; k += 2) {
        const auto xk = static_cast<std::size_t>(k), yk = xk + 1;
        p[xk] = x[xk];
        q[xk] = -x[yk];
        p[yk] = x[yk];
        q[yk] = x[xk];
      }
      std::vector<Jet> g(static_cast<std::size_t>(m * m));
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
          Jet v = -(inv2 * (p[ui] * p[uj] + q[ui] * q[uj]));
          if (i == j) v += inv;
          g[ui * static_cast<std::size_t>(m) + uj] = v;
          g[uj * static_cast<std::size_t>(m) + ui] = std::move(v);
        }
      return g;
    });
    // The affine chart is the geodesic ball of radius π/2 about the origin.
  } else if (chart == "normal") {
    // g = S^2 I + (1 - S^2)/t x x^T - S^4 (Jx)(Jx)^T, S = sin r / r.
    e.metric = ChartMetric(
        tag + ",normal)", m,
        [](std::span<const double> x) {
          double t = 0.0;
          for (double v : x) t += v * v;
          return t < std::numbers::pi * std::numbers::pi / 4.0;
        },
        [](std::span<const Jet> x) {
          const Jet t = squared_norm(x);
          const Jet s = sinc_sqrt(t);
          const Jet s2 = s * s;
          return rotational_components(x, s2, sinc2_complement(t), -(s2 * s2));
        });
    e.metric = e.metric.with_radial_variable(normal_radius_variable(m));
  } else {
    throw InvalidArgument("fubini_study: unknown chart '" + chart + "'");
  }
  e.metric = e.metric.with_injectivity_radius(std::numbers::pi / 2.0);
  e.facts.einstein = true;
  e.facts.harmonic_space = true;
  e.facts.harmonic_centers = {e.center};
  e.facts.density = [m](double r) { return std::pow(std::sin(r), m - 1) * std::cos(r); };
  e.facts.reduced_density = fubini_study_reduced_density(m);
  e.facts.eigen_spread = complex_dim > 1 ? 3.0 : 0.0;
  if (complex_dim == 1) e.facts.sectional_curvature = 4.0;
  return e;
}

CatalogEntry two_d_family(int n, double b) {
  if (n < 2 || n > 40) throw InvalidArgument("two_d_family: n must be in [2, 40]");
  const bool even = n % 2 == 0;
  // g = u I + (1 - u) x x^T / t with u = (1 + b r^n)^2; (1 - u)/t = -(2b r^(n-2) + b^2 r^(2n-2)).
  ChartMetric metric(
      "two_d_family(" + std::to_string(n) + "," + fmt(b) + ")", 2,
      [b, n](std::span<const double> x) {
        const double r = std::hypot(x[0], x[1]);
        return 1.0 + b * std::pow(r, n) > 0.0;
      },
      [n, b, even](std::span<const Jet> x) {
        const Jet t = squared_norm(x);
        Jet rn, rn2;  // r^n and r^(n-2)
        if (even) {
          rn2 = Jet::constant(t.nvars(), t.order(), 1.0);
          for (int k = 0; k < (n - 2) / 2; ++k) rn2 = rn2 * t;
          rn = rn2 * t;
        } else if (t.value() > 0.0) {
          rn2 = pow(t, 0.5 * (n - 2));
          rn = rn2 * t;
        } else {
          // r^n is C^(n-1) at the origin with vanishing derivatives up to order n - 1.
          if (t.order() >= n)
            throw OrderExceeded("two_d_family: odd n = " + std::to_string(n) + " is only C^" + std::to_string(n - 1) +
                                " at the origin; order " + std::to_string(t.order()) + " requested");
          rn2 = Jet::constant(t.nvars(), t.order(), 0.0);
          rn = rn2;
        }
        const Jet one_plus = 1.0 + b * rn;
        const Jet u = one_plus * one_plus;
        const Jet beta = -(2.0 * b * rn2 + b * b * rn2 * rn);
        return rotational_components(x, u, beta);
      });
  metric = metric.with_radial_variable(normal_radius_variable(2));
  if (b >= 0) metric = metric.with_injectivity_radius(std::numeric_limits<double>::infinity());
  CatalogEntry e{"two_d_family", {{"n", n}, {"b", b}}, "normal", metric, Point{0.0, 0.0}, {}};
  e.facts.harmonic_centers = {e.center};
  e.facts.density = [n, b](double r) { return r * (1.0 + b * std::pow(r, n)); };
  if (n % 2 == 0)
    e.facts.reduced_density = RadialFunction(
        "1 + b r^n", [n, b](const Jet& t) { return 1.0 + b * pow(t, 0.5 * n); }, 0.0,
        std::numeric_limits<double>::infinity());
  e.facts.eigen_spread = 0.0;
  if (b == 0.0) e.facts.sectional_curvature = 0.0;
  e.facts.einstein = true;  // every surface is Einstein
  return e;
}

}  // namespace catalog

std::vector<std::string> catalog_families() {
  return {"euclidean", "space_form", "g_ab", "sphere", "fubini_study", "two_d_family"};
}

CatalogEntry build(const std::string& family, const CatalogParams& params, const std::string& chart) {
  if (family == "euclidean") {
    allow_only(params, {"dim"}, family);
    if (!chart.empty() && chart != "normal") throw InvalidArgument("euclidean: unknown chart '" + chart + "'");
    return catalog::euclidean(integer_param(params, "dim", family));
  }
  if (family == "space_form" || family == "g_ab") {
    allow_only(params, {"a", "b", "dim"}, family);
    if (!chart.empty() && chart != "conformal") throw InvalidArgument(family + ": unknown chart '" + chart + "'");
    const int m = integer_param(params, "dim", family);
    return catalog::space_form(real_param(params, "a", family), real_param(params, "b", family), m);
  }
  if (family == "sphere") {
    allow_only(params, {"dim"}, family);
    return catalog::sphere(integer_param(params, "dim", family), chart.empty() ? "stereographic" : chart);
  }
  if (family == "fubini_study") {
    allow_only(params, {"complex_dim"}, family);
    return catalog::fubini_study(integer_param(params, "complex_dim", family), chart.empty() ? "affine" : chart);
  }
  if (family == "two_d_family") {
    allow_only(params, {"n", "b"}, family);
    if (!chart.empty() && chart != "normal") throw InvalidArgument("two_d_family: unknown chart '" + chart + "'");
    return catalog::two_d_family(integer_param(params, "n", family), real_param(params, "b", family));
  }
  throw InvalidArgument("unknown metric family '" + family + "'");
}

}  // namespace hml
