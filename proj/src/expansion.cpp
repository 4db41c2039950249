#include "hml/expansion.hpp"

#include "hml/errors.hpp"

namespace hml {

JacobiOperator jacobi(const CurvatureBundle& bundle, const Vector& xi, int k) {
  const int m = bundle.m;
  if (xi.size() != m) throw InvalidArgument("jacobi: dimension mismatch");
  if (k > bundle.k_max()) throw OrderExceeded("jacobi: ∇^" + std::to_string(k) + "R not available in the bundle");
  const auto& t = bundle.nabla(k);
  // Contract the k derivative slots (trailing), then slots 2 and 3.
  std::vector<double> cur(t.begin(), t.end());
  std::size_t len = cur.size();
  for (int s = 0; s < k; ++s) {
    len /= static_cast<std::size_t>(m);
    std::vector<double> next(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      double acc = 0.0;
      for (int p = 0; p < m; ++p) acc += cur[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(p)] * xi(p);
      next[i] = acc;
    }
    cur.swap(next);
  }
  JacobiOperator J;
  J.xi = xi;
  J.k = k;
  J.form = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l) {
      double acc = 0.0;
      for (int j = 0; j < m; ++j)
        for (int c = 0; c < m; ++c)
          acc += cur[static_cast<std::size_t>(((i * m + j) * m + c) * m + l)] * xi(j) * xi(c);
      J.form(i, l) = acc;
    }
  J.operator_ = bundle.inverse * J.form.transpose();
  return J;
}

JacobiOperator jacobi(const ChartMetric& metric, const Point& P, const Vector& xi, int k) {
  return jacobi(curvature(metric, P, k), xi, k);
}

DensityExpansion density_coefficients(const CurvatureBundle& bundle, const Vector& xi) {
  std::vector<Matrix> J;
  for (int k = 0; k <= 4; ++k) J.push_back(jacobi(bundle, xi, k).operator_);
  const double t0 = J[0].trace(), t1 = J[1].trace(), t2 = J[2].trace(), t3 = J[3].trace(), t4 = J[4].trace();
  const double t00 = (J[0] * J[0]).trace(), t01 = (J[0] * J[1]).trace(), t02 = (J[0] * J[2]).trace();
  const double t000 = (J[0] * J[0] * J[0]).trace(), t11 = (J[1] * J[1]).trace();
  DensityExpansion e;
  e.xi = xi;
  e.H.assign(7, 0.0);
  e.H[2] = -t0 / 6.0;
  e.H[3] = -t1 / 12.0;
  e.H[4] = t0 * t0 / 72.0 - t00 / 180.0 - t2 / 40.0;
  e.H[5] = t0 * t1 / 72.0 - t01 / 180.0 - t3 / 180.0;
  e.H[6] = -t0 * t0 * t0 / 1296.0 + t0 * t00 / 1080.0 + t0 * t2 / 240.0 - t000 / 2835.0 - t02 / 630.0 +
           t1 * t1 / 288.0 - t11 / 672.0 - t4 / 1008.0;
  return e;
}

DensityExpansion density_coefficients(const ChartMetric& metric, const Point& P, const Vector& xi) {
  return density_coefficients(curvature(metric, P, 4), xi);
}

Rational leading_coefficient(int n) {
  if (n < 2) throw InvalidArgument("leading_coefficient: n must be at least 2");
  boost::multiprecision::cpp_int fact = 1;
  for (int i = 2; i <= n + 1; ++i) fact *= i;
  return Rational(-(n - 1), 1) / Rational(fact);
}

LeadingCoefficientCheck verify_leading_coefficient(int n, const Rational& b, int truncation) {
  using S = TruncatedSeries<Rational>;
  using L = LaurentSeries<Rational>;
  if (n < 2) throw InvalidArgument("verify_leading_coefficient: n must be at least 2");
  if (b == 0) throw InvalidArgument("verify_leading_coefficient: b must be nonzero");
  const int N = truncation < 0 ? n + 2 : truncation;
  if (N < n + 2) throw OrderExceeded("verify_leading_coefficient: truncation order must be at least n + 2");

  LeadingCoefficientCheck out;
  out.n = n;
  out.b = b;
  out.truncation = N;

  // Θ = r(1 + b r^n) and f = Θ^2 = r^2 (1 + b r^n)^2.
  const S unit = S::constant(1, N) + S::monomial(n, N, b);
  const L f{2, unit * unit};
  const L finv = reciprocal(f);
  const L fr = derive(f);
  const L frr = derive(fr);
  const L half_frr = Rational(-1, 2) * frr;
  const L quarter = Rational(1, 4) * (fr * fr * finv);
  const L bracket = half_frr + quarter;
  const L trj = finv * bracket;

  const Rational nn(n);
  out.lines = {
      {"f", 2, 1, f.coeff(2)},
      {"f", n + 2, 2 * b, f.coeff(n + 2)},
      {"f^-1", -2, 1, finv.coeff(-2)},
      {"f^-1", n - 2, -2 * b, finv.coeff(n - 2)},
      {"-f_rr/2", 0, -1, half_frr.coeff(0)},
      {"-f_rr/2", n, -(nn + 2) * (nn + 1) * b, half_frr.coeff(n)},
      {"f_r^2 f^-1/4", 0, 1, quarter.coeff(0)},
      {"f_r^2 f^-1/4", n, (2 * (nn + 2) - 2) * b, quarter.coeff(n)},
      {"-f_rr/2 + f_r^2 f^-1/4", 0, 0, bracket.coeff(0)},
      {"-f_rr/2 + f_r^2 f^-1/4", n, -nn * (nn + 1) * b, bracket.coeff(n)},
  };
  for (int k = -2; k < n - 2; ++k) out.lines.push_back({"Tr J", k, 0, trj.coeff(k)});
  out.lines.push_back({"Tr J", n - 2, -nn * (nn + 1) * b, trj.coeff(n - 2)});
  for (int k = 1; k < n; ++k) out.lines.push_back({"f^-1 lower terms", k - 2, 0, finv.coeff(k - 2)});

  out.trace_coefficient = trj.coeff(n - 2);
  // H_n from the density: sqrt(f)/r - 1.
  const S theta_over_r = sqrt(unit * unit);
  out.density_coefficient = theta_over_r.coeff(n);
  // In dimension 2, J_k(∂_r) = (d/dr)^k Tr J_0 at r = 0 and J_k = 0 for k < n - 2, so every
  // lower-order product in H_n vanishes and H_n = c_n Tr J_(n-2).
  boost::multiprecision::cpp_int fact = 1;
  for (int i = 2; i <= n - 2; ++i) fact *= i;
  out.recovered = out.density_coefficient / (Rational(fact) * out.trace_coefficient);
  out.formula = leading_coefficient(n);
  out.passed = out.recovered == out.formula && out.density_coefficient == b;
  for (const auto& line : out.lines) out.passed = out.passed && line.ok();
  return out;
}

}  // namespace hml
