#include "hml/series.hpp"

#include <numbers>

#include <Eigen/Dense>

namespace hml {

namespace {

RadialFit solve_fit(std::span<const double> r, std::span<const double> ys, int order, const FitOptions& options) {
  const int n = static_cast<int>(r.size());
  const int p = order - 1;  // unknowns H_2..H_order
  if (n < 2 * order) throw InvalidArgument("fit_radial_expansion: need at least 2*order samples");
  const double rmax = *std::max_element(r.begin(), r.end());
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double ri = r[static_cast<std::size_t>(i)];
    if (!(ri > 0.0)) throw InvalidArgument("fit_radial_expansion: radii must be positive");
    const double s = ri / rmax;
    double sk = s * s;
    for (int k = 0; k < p; ++k, sk *= s) a(i, k) = sk;
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  // Column equilibration before the SVD keeps the reported condition number meaningful.
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (int k = 0; k < p; ++k) a.col(k) /= scale(k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond < options.max_condition))
    throw IllConditioned("fit_radial_expansion: Vandermonde system ill-conditioned (condition " +
                             std::to_string(cond) + ")",
                         cond);
  const Eigen::VectorXd beta = svd.solve(y);
  const Eigen::VectorXd res = a * beta - y;

  RadialFit fit;
  fit.order = order;
  fit.r_max = rmax;
  fit.condition = cond;
  fit.H.assign(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 0; k < p; ++k) fit.H[static_cast<std::size_t>(k) + 2] = beta(k) / scale(k) / std::pow(rmax, k + 2);
  fit.residual_rms = std::sqrt(res.squaredNorm() / n);
  fit.residual_max = res.cwiseAbs().maxCoeff();
  return fit;
}

}  // namespace

RadialFit fit_radial_expansion(std::span<const double> r, std::span<const double> theta, int m, int order,
                               const FitOptions& options) {
  if (r.size() != theta.size()) throw InvalidArgument("fit_radial_expansion: size mismatch");
  std::vector<double> y(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) y[i] = theta[i] / std::pow(r[i], m - 1) - 1.0;
  RadialFit fit = fit_density_deviation(r, y, order, options);
  fit.m = m;
  return fit;
}

RadialFit fit_density_deviation(std::span<const double> r, std::span<const double> y, int order,
                                const FitOptions& options) {
  if (r.size() != y.size()) throw InvalidArgument("fit_radial_expansion: size mismatch");
  if (order < 2) throw InvalidArgument("fit_radial_expansion: order must be at least 2");
  RadialFit fit = solve_fit(r, y, order, options);
  if (options.refit) {
    std::vector<double> rh, th;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] <= 0.5 * fit.r_max * (1 + 1e-12)) {
        rh.push_back(r[i]);
        th.push_back(y[i]);
      }
    if (static_cast<int>(rh.size()) >= 2 * order) {
      try {
        const RadialFit half = solve_fit(rh, th, order, options);
        fit.refit_delta.resize(fit.H.size());
        for (std::size_t k = 0; k < fit.H.size(); ++k) fit.refit_delta[k] = std::abs(fit.H[k] - half.H[k]);
      } catch (const IllConditioned&) {
      }
    }
  }
  return fit;
}

std::vector<double> fit_radii(double r_max, int n) {
  if (n < 1 || !(r_max > 0)) throw InvalidArgument("fit_radii: need n >= 1 and r_max > 0");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Chebyshev points of [0, r_max] with the endpoint r = 0 removed.
    const double th = std::numbers::pi * (i + 1) / (2.0 * n);
    r[static_cast<std::size_t>(i)] = r_max * std::sin(th) * std::sin(th);
  }
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace hml
