#include "hml/geodesic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <boost/numeric/odeint.hpp>

#include "hml/curvature.hpp"
#include "hml/errors.hpp"
#include "hml/sampling.hpp"

namespace hml {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

struct Layout {
  int m, k;
  std::size_t x() const { return 0; }
  std::size_t v() const { return static_cast<std::size_t>(m); }
  std::size_t e() const { return static_cast<std::size_t>(2 * m); }  // E_a^j at e() + a*m + j
  std::size_t a() const { return e() + static_cast<std::size_t>(m * k); }
  std::size_t da() const { return a() + static_cast<std::size_t>(k * k); }
  std::size_t size() const { return da() + static_cast<std::size_t>(k * k); }
};

Eigen::Map<const Matrix> frame_of(const State& s, const Layout& L) {
  return {s.data() + L.e(), L.m, L.k};
}

struct System {
  const ChartMetric* metric;
  Layout L;

  // The A, A' slots hold D = A - rI and D' = A' - I, which keeps Θ/r^(m-1) - 1 accurate at small r.
  void operator()(const State& s, State& ds, double r) const {
    const int m = L.m, k = L.k;
    const std::span<const double> x(s.data(), static_cast<std::size_t>(m));
    const auto pg = point_geometry(*metric, x, true);
    const double* v = s.data() + L.v();
    const auto E = frame_of(s, L);
    for (int i = 0; i < m; ++i) ds[L.x() + static_cast<std::size_t>(i)] = v[i];
    for (int c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) acc += pg.Gamma(i, j, c) * v[i] * v[j];
      ds[L.v() + static_cast<std::size_t>(c)] = -acc;
    }
    // Γ(v, ·) as a matrix acting on frame vectors.
    Matrix gv = Matrix::Zero(m, m);
    for (int c = 0; c < m; ++c)
      for (int j = 0; j < m; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += pg.Gamma(i, j, c) * v[i];
        gv(c, j) = acc;
      }
    Eigen::Map<Matrix> dE(ds.data() + L.e(), m, k);
    dE = -gv * E;
    // w_il = R(∂i, v, v, ∂l), R̃ = E^T w E.
    Matrix w = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j)
          for (int c = 0; c < m; ++c) acc += pg.R(i, j, c, l) * v[j] * v[c];
        w(i, l) = acc;
      }
    const Matrix rt = E.transpose() * w * E;
    Eigen::Map<const Matrix> D(s.data() + L.a(), k, k), dD(s.data() + L.da(), k, k);
    Eigen::Map<Matrix>(ds.data() + L.a(), k, k) = dD;
    Eigen::Map<Matrix>(ds.data() + L.da(), k, k) = -rt * D - r * rt;
  }
};

PolarDensitySample make_sample(const ChartMetric& metric, const Point& center, const Vector& dir, double r,
                               const State& s, const Layout& L) {
  PolarDensitySample out;
  out.center = center;
  out.direction = dir;
  out.r = r;
  out.endpoint.assign(s.begin(), s.begin() + L.m);
  out.velocity = Eigen::Map<const Vector>(s.data() + L.v(), L.m);
  out.frame = frame_of(s, L);
  const Matrix D = Eigen::Map<const Matrix>(s.data() + L.a(), L.k, L.k);
  out.A = D + r * Matrix::Identity(L.k, L.k);
  out.dA = Eigen::Map<const Matrix>(s.data() + L.da(), L.k, L.k) + Matrix::Identity(L.k, L.k);
  out.reduced_minus_one = r > 0.0 ? det_identity_plus_minus_one(D / r) : 0.0;
  out.theta = std::pow(r, L.k) * (1.0 + out.reduced_minus_one);
  out.conjugate = !(out.theta > 0.0) && r > 0.0;
  if (r > 0.0 && !out.conjugate) {
    const Matrix l = out.dA * out.A.inverse();
    out.xi = l.trace();
    const auto pg = point_geometry(metric, out.endpoint, true);
    double ric = 0.0;
    for (int i = 0; i < L.m; ++i)
      for (int j = 0; j < L.m; ++j)
        for (int c = 0; c < L.m; ++c)
          for (int q = 0; q < L.m; ++q) {
            double e = 0.0;  // Σ_a E_a^i E_a^q
            for (int a = 0; a < L.k; ++a) e += out.frame(i, a) * out.frame(q, a);
            ric += e * pg.R(i, j, c, q) * out.velocity(j) * out.velocity(c);
          }
    out.xi_prime = -(l * l).trace() - ric;
  } else {
    out.xi = out.xi_prime = std::numeric_limits<double>::quiet_NaN();
  }
  const Matrix g = metric.value(out.endpoint);
  out.speed_drift = std::abs(std::sqrt(out.velocity.dot(g * out.velocity)) - 1.0);
  return out;
}

State initial_state(const ChartMetric& metric, const Point& center, const Vector& dir, const Layout& L) {
  const Matrix g = metric.value(center);
  const double norm = std::sqrt(dir.dot(g * dir));
  if (std::abs(norm - 1.0) > 1e-8) throw InvalidArgument("shoot: direction is not g-unit at the center");
  State s(L.size(), 0.0);
  for (int i = 0; i < L.m; ++i) {
    s[L.x() + static_cast<std::size_t>(i)] = center[static_cast<std::size_t>(i)];
    s[L.v() + static_cast<std::size_t>(i)] = dir(i) / norm;
  }
  Eigen::Map<Matrix>(s.data() + L.e(), L.m, L.k) = orthonormal_complement(g, dir / norm);
  return s;
}

std::vector<PolarDensitySample> integrate(const ChartMetric& metric, const Point& center, const Vector& dir,
                                          const std::vector<double>& radii, const IntegratorConfig& cfg,
                                          bool adaptive) {
  const int m = metric.dim();
  const Layout L{m, m - 1};
  System sys{&metric, L};
  State s = initial_state(metric, center, dir, L);
  const double r_end = radii.back();
  double r_start = 0.0;

  if (cfg.start_epsilon > 0.0) {
    // Jacobi data from the series A(ε) = εI - ε³/6 R̃(0), A'(ε) = I - ε²/2 R̃(0).
    const double eps = std::min(cfg.start_epsilon, 0.5 * radii.front());
    const Matrix rt = reduced_jacobi(metric, center, dir);
    odeint::runge_kutta4<State> rk;
    odeint::integrate_const(rk, std::ref(sys), s, 0.0, eps, eps / 8.0);
    Eigen::Map<Matrix>(s.data() + L.a(), L.k, L.k) = -(eps * eps * eps / 6.0) * rt;
    Eigen::Map<Matrix>(s.data() + L.da(), L.k, L.k) = -(eps * eps / 2.0) * rt;
    r_start = eps;
  }

  std::vector<double> times;
  times.reserve(radii.size() + 1);
  times.push_back(r_start);
  for (double r : radii) times.push_back(r);

  std::vector<PolarDensitySample> out;
  out.reserve(radii.size());
  double last_r = r_start;
  auto observer = [&](const State& st, double r) {
    last_r = r;
    if (r == r_start && r_start < radii.front()) return;
    out.push_back(make_sample(metric, center, dir, r, st, L));
  };
  try {
    if (adaptive) {
      auto stepper = odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_fehlberg78<State>());
      odeint::integrate_times(stepper, std::ref(sys), s, times.begin(), times.end(), r_end / cfg.steps, observer);
    } else {
      odeint::runge_kutta4<State> stepper;
      odeint::integrate_times(stepper, std::ref(sys), s, times.begin(), times.end(), r_end / cfg.steps, observer);
    }
  } catch (const DomainExit& e) {
    throw DomainExit("geodesic left the chart domain after r = " + std::to_string(last_r), last_r);
  } catch (const DegenerateMetric& e) {
    throw DomainExit(std::string("metric degenerates along the geodesic after r = ") + std::to_string(last_r),
                     last_r);
  }
  for (auto& smp : out) smp.adaptive = adaptive;
  return out;
}

}  // namespace

double det_identity_plus_minus_one(const Matrix& M) {
  // Sum of all principal minors of M; exact in structure, so small M keeps full relative precision.
  const int k = static_cast<int>(M.rows());
  if (k > 16) return (Matrix::Identity(k, k) + M).determinant() - 1.0;
  double total = 0.0;
  std::vector<int> idx;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    idx.clear();
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int n = static_cast<int>(idx.size());
    Matrix sub(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) sub(a, b) = M(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    total += n == 1 ? sub(0, 0) : sub.determinant();
  }
  return total;
}

std::vector<PolarDensitySample> shoot_profile(const ChartMetric& metric, const Point& center, const Vector& direction,
                                              const std::vector<double>& radii, const IntegratorConfig& config) {
  if (radii.empty()) return {};
  if (static_cast<int>(center.size()) != metric.dim() || direction.size() != metric.dim())
    throw InvalidArgument("shoot: dimension mismatch");
  if (metric.dim() < 2) throw InvalidArgument("shoot: dimension must be at least 2");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i && !(radii[i] > radii[i - 1])))
      throw InvalidArgument("shoot: radii must be positive and strictly increasing");
  if (config.steps < 1) throw InvalidArgument("shoot: steps must be positive");
  if (!metric.in_domain(center)) throw DomainExit("shoot: center outside the chart domain", 0.0);

  if (!config.force_adaptive) {
    auto out = integrate(metric, center, direction, radii, config, false);
    double drift = 0.0;
    for (const auto& s : out) drift = std::max(drift, s.speed_drift);
    if (drift <= config.energy_tol) return out;
  }
  return integrate(metric, center, direction, radii, config, true);
}

PolarDensitySample shoot(const ChartMetric& metric, const Point& center, const Vector& direction, double r,
                         const IntegratorConfig& config) {
  return shoot_profile(metric, center, direction, {r}, config).front();
}

DensityTable density_profile(const ChartMetric& metric, const Point& center, const std::vector<Vector>& directions,
                             const std::vector<double>& radii, const IntegratorConfig& config, int threads) {
  DensityTable table;
  table.center = center;
  table.radii = radii;
  table.directions = directions;
  table.samples.resize(directions.size());
  const int n = static_cast<int>(directions.size());
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::max(1, std::min(workers, n));

  std::atomic<int> next{0};
  std::exception_ptr error;
  int error_index = n;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        table.samples[static_cast<std::size_t>(i)] =
            shoot_profile(metric, center, directions[static_cast<std::size_t>(i)], radii, config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Report the lowest failing direction so errors are deterministic.
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return table;
}

double relative_spread(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += std::abs(v);
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) return *hi - *lo;
  return (*hi - *lo) / mean;
}

const char* to_string(HarmonicityReport::Verdict v) {
  switch (v) {
    case HarmonicityReport::Verdict::Harmonic: return "harmonic";
    case HarmonicityReport::Verdict::NotHarmonic: return "not_harmonic";
    default: return "inconclusive";
  }
}

std::vector<double> default_radii(const ChartMetric& metric) {
  double r_max = 1.0;
  if (const auto iota = metric.injectivity_radius(); iota && std::isfinite(*iota)) r_max = std::min(r_max, *iota / 2.0);
  return linear_radii(r_max / 4.0, r_max, 4);
}

HarmonicityReport centrally_harmonic_test(const ChartMetric& metric, const Point& center,
                                          const HarmonicityConfig& config) {
  HarmonicityReport rep;
  rep.center = center;
  rep.tolerance = config.tolerance;
  rep.radii = config.radii.empty() ? default_radii(metric) : config.radii;
  std::sort(rep.radii.begin(), rep.radii.end());
  rep.einstein_defect = einstein_defect(curvature(metric, center, 0));

  const auto dirs = unit_directions(metric.value(center), config.directions);
  try {
    rep.table = density_profile(metric, center, dirs, rep.radii, config.integrator, config.threads);
  } catch (const DomainExit& e) {
    rep.verdict = HarmonicityReport::Verdict::Inconclusive;
    rep.max_safe_radius = e.last_valid_r();
    rep.note = e.what();
    return rep;
  }
  rep.max_safe_radius = rep.radii.back();
  bool conjugate = false;
  for (std::size_t ri = 0; ri < rep.radii.size(); ++ri) {
    std::vector<double> th, xi;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      const auto& s = rep.table.samples[d][ri];
      conjugate = conjugate || s.conjugate;
      th.push_back(s.theta);
      xi.push_back(s.xi);
    }
    rep.theta_spread.push_back(relative_spread(th));
    rep.xi_spread.push_back(relative_spread(xi));
    rep.max_theta_spread = std::max(rep.max_theta_spread, rep.theta_spread.back());
    rep.max_xi_spread = std::max(rep.max_xi_spread, rep.xi_spread.back());
  }
  if (conjugate) {
    rep.verdict = HarmonicityReport::Verdict::Inconclusive;
    rep.note = "conjugate point reached; radii exceed the injectivity radius";
    return rep;
  }
  const bool radial = rep.max_theta_spread <= config.tolerance && rep.max_xi_spread <= config.tolerance;
  rep.verdict = radial ? HarmonicityReport::Verdict::Harmonic : HarmonicityReport::Verdict::NotHarmonic;
  return rep;
}

std::vector<double> radial_harmonic(const std::vector<double>& r, const std::vector<double>& theta,
                                    const std::vector<double>& xi, double r0) {
  const std::size_t n = r.size();
  if (theta.size() != n || xi.size() != n || n == 0) throw InvalidArgument("radial_harmonic: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(r[i] > 0.0) || !(theta[i] > 0.0)) throw InvalidArgument("radial_harmonic: need r > 0 and Θ > 0");
    if (i && !(r[i] > r[i - 1])) throw InvalidArgument("radial_harmonic: radii must increase");
  }
  const auto it = std::find(r.begin(), r.end(), r0);
  if (it == r.end()) throw InvalidArgument("radial_harmonic: r0 must be a sample radius");
  const std::size_t i0 = static_cast<std::size_t>(it - r.begin());
  std::vector<double> f(n, 0.0), h(n), dh(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = 1.0 / theta[i];
    dh[i] = -xi[i] * h[i];
  }
  auto panel = [&](std::size_t a, std::size_t b) {
    const double w = r[b] - r[a];
    return 0.5 * w * (h[a] + h[b]) + w * w / 12.0 * (dh[a] - dh[b]);
  };
  for (std::size_t i = i0 + 1; i < n; ++i) f[i] = f[i - 1] + panel(i - 1, i);
  for (std::size_t i = i0; i-- > 0;) f[i] = f[i + 1] - panel(i, i + 1);
  return f;
}

std::vector<double> radial_harmonic(const std::vector<double>& r, const std::vector<double>& theta,
                                    const std::vector<double>& xi, const std::vector<double>& xi_prime, double r0) {
  const std::size_t n = r.size();
  if (xi_prime.size() != n) throw InvalidArgument("radial_harmonic: size mismatch");
  // Validates the samples and locates r0.
  std::vector<double> f = radial_harmonic(r, theta, xi, r0);
  const std::size_t i0 = static_cast<std::size_t>(std::find(r.begin(), r.end(), r0) - r.begin());
  std::vector<double> h(n), dh(n), ddh(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = 1.0 / theta[i];
    dh[i] = -xi[i] * h[i];
    ddh[i] = (xi[i] * xi[i] - xi_prime[i]) * h[i];
  }
  auto panel = [&](std::size_t a, std::size_t b) {
    const double w = r[b] - r[a];
    return 0.5 * w * (h[a] + h[b]) + w * w / 10.0 * (dh[a] - dh[b]) + w * w * w / 120.0 * (ddh[a] + ddh[b]);
  };
  f[i0] = 0.0;
  for (std::size_t i = i0 + 1; i < n; ++i) f[i] = f[i - 1] + panel(i - 1, i);
  for (std::size_t i = i0; i-- > 0;) f[i] = f[i + 1] - panel(i, i + 1);
  return f;
}

std::vector<double> radial_harmonic(const DensityTable& table, double r0, double tolerance) {
  const std::size_t nr = table.radii.size();
  std::vector<double> th(nr), xi(nr), dxi(nr);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    std::vector<double> col;
    for (const auto& dir : table.samples) col.push_back(dir[ri].theta);
    if (relative_spread(col) > tolerance)
      throw NonRadial("radial_harmonic: density is not radial at r = " + std::to_string(table.radii[ri]));
    const double w = 1.0 / static_cast<double>(col.size());
    for (const auto& dir : table.samples) {
      th[ri] += w * dir[ri].theta;
      xi[ri] += w * dir[ri].xi;
      dxi[ri] += w * dir[ri].xi_prime;
    }
  }
  return radial_harmonic(table.radii, th, xi, dxi, r0);
}

Matrix reduced_jacobi(const ChartMetric& metric, const Point& center, const Vector& direction) {
  const auto pg = point_geometry(metric, center, true);
  const int m = metric.dim();
  const Matrix E = orthonormal_complement(pg.g, direction);
  Matrix w = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j)
        for (int c = 0; c < m; ++c) acc += pg.R(i, j, c, l) * direction(j) * direction(c);
      w(i, l) = acc;
    }
  const Matrix rt = E.transpose() * w * E;
  return 0.5 * (rt + rt.transpose());
}

SphereShapeSample second_fundamental_form(const ChartMetric& metric, const Point& center, const Vector& direction,
                                          double r, const IntegratorConfig& config) {
  SphereShapeSample out;
  out.sample = shoot(metric, center, direction, r, config);
  if (out.sample.conjugate) throw ConjugatePoint("second_fundamental_form: conjugate point before r");
  const Matrix l = out.sample.dA * out.sample.A.inverse();
  out.asymmetry = (l - l.transpose()).norm();
  out.L = 0.5 * (l + l.transpose());
  const int k = static_cast<int>(out.L.rows());
  out.umbilicity_defect = (out.L - (out.L.trace() / k) * Matrix::Identity(k, k)).norm();
  out.jacobi_reduced = reduced_jacobi(metric, center, direction);
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.jacobi_reduced);
  out.jacobi_min = es.eigenvalues().minCoeff();
  out.jacobi_max = es.eigenvalues().maxCoeff();
  return out;
}

EigenSpread eigen_spread(const ChartMetric& metric, const Point& center, int directions) {
  const auto dirs = unit_directions(metric.value(center), directions);
  EigenSpread out;
  out.s = std::numeric_limits<double>::infinity();
  for (const auto& d : dirs) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(reduced_jacobi(metric, center, d));
    const double gap = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    out.max_gap = std::max(out.max_gap, gap);
    if (gap < out.s) {
      out.s = gap;
      out.argmin_direction = d;
    }
  }
  return out;
}

}  // namespace hml
