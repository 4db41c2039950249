#include "hml/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Dense>

#include "hml/catalog.hpp"
#include "hml/curvature.hpp"
#include "hml/errors.hpp"
#include "hml/series.hpp"

namespace hml {

namespace {

using boost::math::quadrature::gauss_kronrod;

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

std::function<double(double)> radial_t_of_r(const RadialVariable& rv) {
  if (!rv.t_of_r) throw InvalidArgument("radial variable has no known dependence on geodesic distance");
  auto f = rv.t_of_r;
  return [f](double r) { return f(Jet::constant(1, 0, r)).value(); };
}

Reparametrization::Reparametrization(RadialFunction psi, double r_max, std::function<double(double)> t_of_r)
    : psi_(std::move(psi)), r_max_(r_max), t_of_r_(std::move(t_of_r)) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("reparametrize: r_max must be positive and finite");
  if (!t_of_r_) t_of_r_ = [](double r) { return r * r; };
  auto value = [this](double r) {
    const double t = t_of_r_(r);
    return psi_.in_domain(t) ? psi_(t) : std::numeric_limits<double>::quiet_NaN();
  };
  // Scan for a sign change or a point outside ψ's domain, then bisect to locate it.
  const int n = 4000;
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = r_max * i / n;
    const double v = value(r);
    if (!(v > 0.0)) {
      double lo = prev, hi = r;
      for (int it = 0; it < 60 && i > 0; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) > 0.0 ? lo : hi) = mid;
      }
      throw InvalidArgument("reparametrize: ψ vanishes or leaves its domain at r ≈ " + fmt(hi) + " (t ≈ " +
                            fmt(t_of_r_(hi)) + ")");
    }
    prev = r;
  }
  constant_ = psi_.constant_value();
  rc_max_ = forward(r_max);
}

double Reparametrization::forward_derivative(double r) const { return 1.0 / psi_(t_of_r_(r)); }

double Reparametrization::forward(double r) const {
  if (r < 0.0 || r > r_max_ * (1 + 1e-12)) throw InvalidArgument("reparametrize: r outside [0, r_max]");
  if (constant_) return r / *constant_;
  return integrate([this](double s) { return forward_derivative(s); }, 0.0, r);
}

double Reparametrization::inverse(double rc) const {
  if (rc < 0.0 || rc > rc_max_ * (1 + 1e-12)) throw InvalidArgument("reparametrize: ř outside the valid range");
  if (constant_) return rc * *constant_;
  if (rc == 0.0) return 0.0;
  auto f = [this, rc](double r) { return std::make_pair(forward(r) - rc, forward_derivative(r)); };
  double guess = std::clamp(rc * psi_(t_of_r_(0.0)), 0.0, r_max_);
  std::uintmax_t iters = 100;
  return boost::math::tools::newton_raphson_iterate(f, guess, 0.0, r_max_, 50, iters);
}

Reparametrization reparametrize(const RadialFunction& psi, double r_max, std::function<double(double)> t_of_r) {
  return Reparametrization(psi, r_max, std::move(t_of_r));
}

ScalarField radial_scalar_field(const ChartMetric& metric, const RadialFunction& psi) {
  const auto& rv = metric.radial_variable();
  if (!rv || !rv->t_of_x)
    throw InvalidArgument("chart '" + metric.name() + "' has no declared radial variable; radial deformation refused");
  auto t_of_x = rv->t_of_x;
  return ScalarField(psi.description(), [t_of_x, psi](std::span<const Jet> x) { return psi(t_of_x(x)); });
}

ChartMetric deform_metric(const ChartMetric& metric, const RadialFunction& psi) {
  const ScalarField Psi = radial_scalar_field(metric, psi);
  const auto rv = *metric.radial_variable();
  auto t_of_x = rv.t_of_x;
  auto domain = [metric, psi, t_of_x](std::span<const double> x) {
    if (!metric.in_domain(x)) return false;
    const auto xs = Jet::variables(x, 0);
    const double t = t_of_x(xs).value();
    return psi.in_domain(t) && psi(t) > 0.0;
  };
  ChartMetric out(metric.name() + "_psi[" + psi.description() + "]", metric.dim(), domain,
                  [metric, Psi](std::span<const Jet> x) {
                    auto g = metric.jets(x);
                    const Jet p = Psi(x);
                    const Jet f = reciprocal(p * p);
                    for (auto& c : g) c = c * f;
                    return g;
                  });
  // Geodesics from the center are reparametrized rays, so the injectivity radius transforms through ř.
  std::optional<double> iota;
  if (const auto c = psi.constant_value(); c && *c > 0 && metric.injectivity_radius())
    iota = *metric.injectivity_radius() / *c;
  else if (const auto base = metric.injectivity_radius(); base && std::isfinite(*base) && rv.t_of_r) {
    try {
      iota = Reparametrization(psi, *base * (1 - 1e-9), radial_t_of_r(rv)).rc_max();
    } catch (const Error&) {
    }
  }
  RadialVariable drv = rv;
  drv.t_of_r = nullptr;  // t is no longer a known function of the new distance
  return out.with_injectivity_radius(iota).with_radial_variable(drv);
}

ChartMetric conformal_rescale(const ChartMetric& metric, const ScalarField& Psi) {
  auto domain = [metric, Psi](std::span<const double> x) { return metric.in_domain(x) && Psi.value(x) > 0.0; };
  return ChartMetric(metric.name() + "_rescaled[" + Psi.name() + "]", metric.dim(), domain,
                     [metric, Psi](std::span<const Jet> x) {
                       auto g = metric.jets(x);
                       const Jet p = Psi(x);
                       const Jet f = reciprocal(p * p);
                       for (auto& c : g) c = c * f;
                       return g;
                     });
}

ChartMetric scaled_chart(const ChartMetric& metric, double c) {
  if (!(c > 0.0)) throw InvalidArgument("scaled_chart: scale must be positive");
  auto domain = [metric, c](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (auto& v : y) v *= c;
    return metric.in_domain(y);
  };
  return ChartMetric(metric.name() + "_scaled[" + fmt(c) + "]", metric.dim(), domain,
                     [metric, c](std::span<const Jet> x) {
                       std::vector<Jet> y(x.begin(), x.end());
                       for (auto& v : y) v *= c;
                       auto g = metric.jets(y);
                       for (auto& v : g) v *= c * c;
                       return g;
                     });
}

RadialProfile deformed_density(const RadialProfile& base, const Reparametrization& rep, const RadialFunction& psi,
                               int m, std::function<double(double)> t_of_r) {
  if (base.r.size() != base.theta.size()) throw InvalidArgument("deformed_density: size mismatch");
  if (!t_of_r) t_of_r = [](double r) { return r * r; };
  RadialProfile out;
  for (std::size_t i = 0; i < base.r.size(); ++i) {
    const double r = base.r[i];
    out.r.push_back(rep.forward(r));
    const double p = psi(t_of_r(r));
    out.theta.push_back(std::pow(p, 1 - m) * base.theta[i]);
  }
  return out;
}

DensityLawCheck density_law_check(const ChartMetric& base, const RadialFunction& psi,
                                  const std::vector<Vector>& directions, const std::vector<double>& radii,
                                  const IntegratorConfig& config, int threads) {
  const auto& rv = base.radial_variable();
  if (!rv) throw InvalidArgument("chart '" + base.name() + "' has no declared radial variable");
  const auto t_of_r = radial_t_of_r(*rv);
  const int m = base.dim();
  const Point& P = rv->center;
  if (radii.empty() || directions.empty()) throw InvalidArgument("density_law_check: no radii or directions");
  const double r_max = *std::max_element(radii.begin(), radii.end());
  const Reparametrization rep(psi, r_max, t_of_r);
  const ChartMetric deformed = deform_metric(base, psi);

  std::vector<double> rc;
  for (double r : radii) rc.push_back(rep.forward(r));
  // A g-unit θ is ψ(t(P))^-1 θ-long in g_ψ.
  const double scale = psi(t_of_r(0.0));
  std::vector<Vector> ddirs;
  for (const auto& d : directions) ddirs.push_back(scale * d);

  const DensityTable bt = density_profile(base, P, directions, radii, config, threads);
  const DensityTable dt = density_profile(deformed, P, ddirs, rc, config, threads);

  DensityLawCheck out;
  out.center = P;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    for (std::size_t di = 0; di < directions.size(); ++di) {
      RadialProfile bp{{radii[ri]}, {bt.theta(di, ri)}};
      const RadialProfile pred = deformed_density(bp, rep, psi, m, t_of_r);
      DensityLawRow row{di, radii[ri], pred.r[0], bt.theta(di, ri), pred.theta[0], dt.theta(di, ri)};
      out.max_relative_error =
          std::max(out.max_relative_error, std::abs(row.theta_predicted - row.theta_direct) / std::abs(row.theta_direct));
      out.max_reduced_deviation =
          std::max(out.max_reduced_deviation, std::abs(row.theta_direct / std::pow(row.rc, m - 1) - 1.0));
      out.rows.push_back(row);
    }
  }
  return out;
}

Matrix ricci_conformal(const ChartMetric& metric, const ScalarField& Psi, std::span<const double> x) {
  const int m = metric.dim();
  const auto b = curvature(metric, x, 0);
  const Matrix hess = hessian(metric, Psi, x);
  const Jet p = Psi.jet(x, 1);
  const double psi = p.value();
  Vector dpsi(m);
  for (int i = 0; i < m; ++i) dpsi(i) = p.d(i);
  const double norm2 = dpsi.dot(b.inverse * dpsi);
  const double lap0 = -(b.inverse.cwiseProduct(hess)).sum();
  return b.ricci + ((m - 2) / psi) * hess + (-lap0 / psi - (m - 1) * norm2 / (psi * psi)) * b.metric;
}

Matrix pullback(const ChartMetric& metric, const std::function<std::vector<Jet>(std::span<const Jet>)>& map,
                std::span<const double> x) {
  const auto xs = Jet::variables(x, 1);
  const auto ys = map(xs);
  const int m = metric.dim();
  Matrix D(m, static_cast<int>(x.size()));
  Point y(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    y[static_cast<std::size_t>(i)] = ys[static_cast<std::size_t>(i)].value();
    for (int j = 0; j < D.cols(); ++j) D(i, j) = ys[static_cast<std::size_t>(i)].d(j);
  }
  return D.transpose() * metric.value(y) * D;
}

IsometryReport space_form_isometry_check(double a, double b, const std::vector<Point>& points, double c) {
  if (points.empty()) throw InvalidArgument("space_form_isometry_check: no points");
  const int m = static_cast<int>(points.front().size());
  const auto gab = catalog::space_form(a, b, m).metric;
  const auto gba = catalog::space_form(b, a, m).metric;
  const auto gscaled = catalog::space_form(a / c, b * c, m).metric;
  auto inversion = [](std::span<const Jet> x) {
    const Jet inv = reciprocal(squared_norm(x));
    std::vector<Jet> y;
    for (const auto& v : x) y.push_back(v * inv);
    return y;
  };
  auto scaling = [c](std::span<const Jet> x) {
    std::vector<Jet> y(x.begin(), x.end());
    for (auto& v : y) v *= c;
    return y;
  };
  IsometryReport rep{a, b, c, static_cast<int>(points.size()), 0.0, 0.0};
  for (const auto& x : points) {
    double t = 0.0;
    for (double v : x) t += v * v;
    if (t == 0.0) throw DomainExit("space_form_isometry_check: the origin is singular for the inversion", 0.0);
    if (!gab.in_domain(x)) throw DomainExit("space_form_isometry_check: point outside the domain of g_{a,b}", 0.0);
    const Matrix target = gab.value(x);
    rep.inversion_deviation =
        std::max(rep.inversion_deviation, (pullback(gba, inversion, x) - target).cwiseAbs().maxCoeff());
    // s_c maps x / c onto x, so the scaled metric is compared at x / c.
    Point y = x;
    for (auto& v : y) v /= c;
    rep.scaling_deviation =
        std::max(rep.scaling_deviation, (pullback(gab, scaling, y) - gscaled.value(y)).cwiseAbs().maxCoeff());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Trivial-density factor.

namespace {

struct TrivialDensity {
  explicit TrivialDensity(RadialFunction r) : reduced(std::move(r)) {}
  RadialFunction reduced;
  int m;
  double t_end;
  std::vector<double> knots;
  std::vector<double> table;  // I(knots[j])

  using Series = TruncatedSeries<double>;

  Series k_series(double t0, int order) const {
    Series th(reduced.taylor(t0, order), order);
    return pow(th, 1.0 / (m - 1));
  }

  /// Taylor series of h = (k - 1)/(2τk) at t0, to the given order.
  Series h_series(double t0, int order) const {
    const Series k = k_series(t0, order + 1);
    if (t0 == 0.0) {
      if (std::abs(k[0] - 1.0) > 1e-10) throw InvalidArgument("trivial_density_factor: Θ̃(0) must equal 1");
      Series km1 = k + (-1.0);
      km1[0] = 0.0;
      const Series num = divide_by_power(km1, 1);
      return num * reciprocal(2.0 * k.truncated(order));
    }
    const Series tau = Series::constant(t0, order + 1) + Series::monomial(1, order + 1);
    return ((k + (-1.0)) * reciprocal(2.0 * tau * k)).truncated(order);
  }

  std::vector<double> h0;  // Taylor coefficients of h at 0, avoids cancellation in (k - 1)/τ

  double h(double tau) const {
    if (tau < 0.05) {
      double v = 0.0;
      for (auto c = h0.rbegin(); c != h0.rend(); ++c) v = v * tau + *c;
      return v;
    }
    const double k = std::pow(reduced(tau), 1.0 / (m - 1));
    return (k - 1.0) / (2.0 * tau * k);
  }

  /// Fixed-order Gauss–Legendre on a cell where h is smooth.
  double cell(double a, double b) const {
    return boost::math::quadrature::gauss<double, 20>::integrate([this](double s) { return h(s); }, a, b);
  }

  // Cell boundaries: uniform, then halving toward t_end where h may have an integrable
  // singularity, so every Gauss–Legendre cell stays as far from it as it is long.
  void build_table() {
    const Series s = h_series(0.0, kMaxJetOrder - 1);
    for (int j = 0; j <= s.order(); ++j) h0.push_back(s[j]);
    const int n = 256;
    const double step = t_end / n;
    for (int j = 0; j < n; ++j) knots.push_back(j * step);
    for (double w = step; w > t_end * 1e-15; w /= 2) knots.push_back(t_end - w / 2);
    table.assign(knots.size(), 0.0);
    for (std::size_t j = 1; j < knots.size(); ++j) table[j] = table[j - 1] + cell(knots[j - 1], knots[j]);
  }

  double I(double t) const {
    if (t <= 0.0) return 0.0;
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const auto j = static_cast<std::size_t>(it - knots.begin()) - 1;
    return t == knots[j] ? table[j] : table[j] + cell(knots[j], t);
  }

  std::vector<double> taylor(double t0, int order) const {
    const Series k = k_series(t0, order);
    Series I_s = integrate_series(h_series(t0, std::max(order - 1, 0)));
    I_s = I_s.truncated(order);
    I_s[0] = I(t0);
    const Series psi = k * exp(I_s);
    return psi.coeffs();
  }

  static Series integrate_series(const Series& s) { return hml::integrate(s); }
};

}  // namespace

RadialFunction trivial_density_factor(const RadialFunction& reduced_density, int m) {
  if (m < 2) throw InvalidArgument("trivial_density_factor: m must be at least 2");
  const double t_max = reduced_density.t_max();
  auto td = std::make_shared<TrivialDensity>(reduced_density);
  td->m = m;
  td->t_end = std::isfinite(t_max) ? t_max * (1 - 1e-9) : 16.0;
  td->build_table();
  RadialFunction out(
      "trivial-density[" + reduced_density.description() + "]",
      [td](const Jet& t) {
        const auto c = td->taylor(t.value(), t.order());
        return compose(t, c);
      },
      0.0, t_max);
  return out;
}

RadialFunction density_root_factor(const RadialFunction& reduced_density, int m) {
  if (m < 2) throw InvalidArgument("density_root_factor: m must be at least 2");
  return RadialFunction(
      "density-root[" + reduced_density.description() + "]",
      [reduced_density, m](const Jet& t) { return pow(reduced_density(t), 1.0 / (m - 1)); }, reduced_density.t_min(),
      reduced_density.t_max());
}

// ---------------------------------------------------------------------------
// Fubini–Study near the cut locus.

PowerLawFit fit_power_law(const std::vector<double>& u, const std::vector<double>& value) {
  const int n = static_cast<int>(u.size());
  if (n < 4 || value.size() != u.size()) throw InvalidArgument("fit_power_law: need at least 4 samples");
  const double sign = value.front() < 0 ? -1.0 : 1.0;
  Eigen::VectorXd y(n), L(n), uu(n);
  for (int i = 0; i < n; ++i) {
    if (!(sign * value[static_cast<std::size_t>(i)] > 0)) throw InvalidArgument("fit_power_law: samples change sign");
    y(i) = std::log(sign * value[static_cast<std::size_t>(i)]);
    L(i) = std::log(u[static_cast<std::size_t>(i)]);
    uu(i) = u[static_cast<std::size_t>(i)];
  }
  // log|v| = α - p log u + log(1 + d u), Gauss–Newton from the pure power law.
  Eigen::MatrixXd A(n, 2);
  A.col(0).setOnes();
  A.col(1) = -L;
  Eigen::Vector3d x;
  x.head<2>() = A.colPivHouseholderQr().solve(y);
  x(2) = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      const double q = 1.0 + x(2) * uu(i);
      r(i) = y(i) - (x(0) - x(1) * L(i) + std::log(q));
      J(i, 0) = 1.0;
      J(i, 1) = -L(i);
      J(i, 2) = uu(i) / q;
    }
    const Eigen::Vector3d dx = J.colPivHouseholderQr().solve(r);
    x += dx;
    if (dx.norm() < 1e-14 * (1 + x.norm())) break;
  }
  PowerLawFit fit;
  fit.c = sign * std::exp(x(0));
  fit.p = x(1);
  fit.d = x(2);
  fit.u = u;
  fit.value = value;
  for (int i = 0; i < n; ++i) {
    const double model = fit.c * std::pow(uu(i), -fit.p) * (1 + fit.d * uu(i));
    fit.residual = std::max(fit.residual, std::abs(model / value[static_cast<std::size_t>(i)] - 1.0));
  }
  return fit;
}

BlowupReport completeness_and_blowup(int m, const std::string& factor, double u_min, double u_max, int samples) {
  if (m < 4 || m % 2) throw InvalidArgument("completeness_and_blowup: m must be even and at least 4");
  if (!(u_min > 0 && u_max > u_min && u_max < 0.5) || samples < 4)
    throw InvalidArgument("completeness_and_blowup: bad sampling window");
  const double half_pi = std::numbers::pi / 2;
  const RadialFunction reduced = fubini_study_reduced_density(m);
  RadialFunction psi = factor == "density-root"      ? density_root_factor(reduced, m)
                       : factor == "trivial-density" ? trivial_density_factor(reduced, m)
                                                     : throw InvalidArgument("unknown factor '" + factor + "'");
  BlowupReport rep;
  rep.m = m;
  rep.factor = factor;

  // ψ as a function of u = π/2 - r. The density-root factor has a closed form that stays
  // accurate as u → 0; the other factor goes through t = r^2.
  auto psi_u = [&](double u) {
    if (factor == "density-root") {
      const double red = std::pow(std::cos(u) / (half_pi - u), m - 1) * std::sin(u);
      return std::pow(red, 1.0 / (m - 1));
    }
    const double r = half_pi - u;
    return psi(r * r);
  };

  // Exponent detection: ψ ≈ A u^q near u = 0.
  {
    std::vector<double> us, ps;
    for (int i = 0; i < 12; ++i) {
      const double u = 1e-6 * std::pow(10.0, 2.0 * i / 11.0);
      us.push_back(u);
      ps.push_back(psi_u(u));
    }
    const PowerLawFit f = fit_power_law(us, ps);
    rep.psi_exponent = -f.p;
    rep.psi_prefactor = f.c;
  }
  // ∫_0^{π/2} ψ^-1 du: analytic tail below δ, Gauss–Kronrod above.
  const double delta = 1e-6;
  const double q = rep.psi_exponent;
  double tail = std::numeric_limits<double>::infinity();
  if (q < 1.0) tail = std::pow(delta, 1.0 - q) / ((1.0 - q) * rep.psi_prefactor);
  // u = v^e with e = 1/(1 - q) turns the u^-q endpoint behavior into a smooth integrand.
  const double e = (q > 0.0 && q < 1.0) ? 1.0 / (1.0 - q) : 1.0;
  double err = 0.0;
  const double body = gauss_kronrod<double, 61>::integrate(
      [&](double v) {
        const double u = std::pow(v, e);
        return e * std::pow(v, e - 1.0) / psi_u(u);
      },
      std::pow(delta, 1.0 / e), std::pow(half_pi, 1.0 / e), 15, 1e-11, &err);
  rep.length = tail + body;
  rep.length_error = err + std::abs(tail) * delta;  // next term of the tail expansion is O(δ) relative
  rep.finite_length = q < 1.0 && std::isfinite(rep.length);

  // ρ_{g_ψ}(ψ∂_u, ψ∂_u) two ways.
  const auto fs = catalog::fubini_study(m / 2, "normal");
  const ChartMetric deformed = deform_metric(fs.metric, psi);
  std::vector<double> us, direct, formula;
  for (int i = 0; i < samples; ++i) {
    const double u = u_min * std::pow(u_max / u_min, static_cast<double>(i) / (samples - 1));
    const double r = half_pi - u;
    us.push_back(u);
    Point x(static_cast<std::size_t>(m), 0.0);
    x[0] = r;
    const auto b = curvature(deformed, x, 0);
    const double p = psi(r * r);
    direct.push_back(p * p * b.ricci(0, 0));

    const Jet rj = Jet::variable(1, 2, 0, r);
    const Jet P = psi(rj * rj);
    const double P0 = P.value(), P1 = P.d(0), P2 = P.d(0, 0);
    const double Xi = (m - 1) / std::tan(r) - std::tan(r);
    const double rho = (m + 2) + (m - 2) * P2 / P0 + (P2 + Xi * P1) / P0 - (m - 1) * P1 * P1 / (P0 * P0);
    formula.push_back(P0 * P0 * rho);
    rep.max_route_disagreement =
        std::max(rep.max_route_disagreement, std::abs(direct.back() - formula.back()) / std::abs(formula.back()));
  }
  rep.direct = fit_power_law(us, direct);
  rep.formula = fit_power_law(us, formula);
  return rep;
}

}  // namespace hml
