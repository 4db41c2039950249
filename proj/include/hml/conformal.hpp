#pragma once

// Radial conformal deformations g_ψ = ψ(t)^-2 g, t the chart's radial variable.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hml/geodesic.hpp"
#include "hml/metric.hpp"
#include "hml/radial_function.hpp"

namespace hml {

/// ř(r) = ∫_0^r ψ(t(s))^-1 ds and its inverse on [0, r_max].
class Reparametrization {
 public:
  Reparametrization(RadialFunction psi, double r_max, std::function<double(double)> t_of_r);

  double forward(double r) const;
  double inverse(double rc) const;
  /// dř/dr = ψ(t(r))^-1
  double forward_derivative(double r) const;
  double r_max() const { return r_max_; }
  double rc_max() const { return rc_max_; }

 private:
  RadialFunction psi_;
  double r_max_, rc_max_;
  std::function<double(double)> t_of_r_;
  std::optional<double> constant_;
};

/// t = r^2 unless the radial variable says otherwise. Throws InvalidArgument if ψ <= 0 on the range,
/// naming where it vanishes.
Reparametrization reparametrize(const RadialFunction& psi, double r_max,
                                std::function<double(double)> t_of_r = nullptr);

/// t(r) as a plain function for a chart's radial variable.
std::function<double(double)> radial_t_of_r(const RadialVariable& rv);

/// Ψ = ψ(t(x)) as a scalar field on a chart with a declared radial variable.
ScalarField radial_scalar_field(const ChartMetric& metric, const RadialFunction& psi);

/// ψ(t(x))^-2 g; refuses charts without a declared radial variable.
ChartMetric deform_metric(const ChartMetric& metric, const RadialFunction& psi);

/// Ψ^-2 g for an arbitrary positive scalar field.
ChartMetric conformal_rescale(const ChartMetric& metric, const ScalarField& Psi);

/// x ↦ c x pulled back: c^2 g(c x).
ChartMetric scaled_chart(const ChartMetric& metric, double c);

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> theta;
};

/// Θ_{g_ψ}(ř_i) = ψ(t(r_i))^(1-m) Θ_g(r_i) at ř_i = ř(r_i).
RadialProfile deformed_density(const RadialProfile& base, const Reparametrization& rep, const RadialFunction& psi,
                               int m, std::function<double(double)> t_of_r = nullptr);

struct DensityLawRow {
  std::size_t direction = 0;
  double r = 0.0, rc = 0.0;  // base and deformed distance
  double theta_base = 0.0;
  double theta_predicted = 0.0;  // from the base density
  double theta_direct = 0.0;     // shot in g_ψ
};

struct DensityLawCheck {
  Point center;
  std::vector<DensityLawRow> rows;  // ordered by (r, direction)
  double max_relative_error = 0.0;
  double max_reduced_deviation = 0.0;  // max |Θ_direct ř^(1-m) - 1|
};

/// Compares the density law with shooting in g_ψ from the radial variable's center.
/// `directions` are g-unit at the center; `radii` are base distances.
DensityLawCheck density_law_check(const ChartMetric& base, const RadialFunction& psi,
                                  const std::vector<Vector>& directions, const std::vector<double>& radii,
                                  const IntegratorConfig& config = {}, int threads = 0);

/// ρ_g + (m-2)Ψ^-1 Hess Ψ + (-Ψ^-1 Δ⁰Ψ - (m-1)Ψ^-2 |dΨ|^2) g, Δ⁰ = -tr Hess.
Matrix ricci_conformal(const ChartMetric& metric, const ScalarField& Psi, std::span<const double> x);

struct IsometryReport {
  double a = 0, b = 0, c = 0;
  int points = 0;
  double inversion_deviation = 0.0;  // max |(ι* g_{b,a}) - g_{a,b}|
  double scaling_deviation = 0.0;    // max |(s_c* g_{a,b}) - g_{a/c, b c}|
};

/// Pullback of the m x m metric through a map given on coordinate jets.
Matrix pullback(const ChartMetric& metric, const std::function<std::vector<Jet>(std::span<const Jet>)>& map,
                std::span<const double> x);

IsometryReport space_form_isometry_check(double a, double b, const std::vector<Point>& points, double c = 3.0);

/// The genuine trivial-density factor: with k = Θ̃^(1/(m-1)),
///   ψ(t) = k(t) exp(∫_0^t (k - 1)/(2τk) dτ)
/// solves ř^(m-1) = ψ^(1-m) r^(m-1) Θ̃(r), so Θ̃_{g_ψ} ≡ 1. `reduced_density` is Θ̃(√t).
RadialFunction trivial_density_factor(const RadialFunction& reduced_density, int m);

/// ψ = Θ̃^(1/(m-1)) (the closed form quoted for the Fubini–Study example).
RadialFunction density_root_factor(const RadialFunction& reduced_density, int m);

struct PowerLawFit {
  double c = 0.0, p = 0.0, d = 0.0;  // value ≈ c u^-p (1 + d u)
  double residual = 0.0;             // max relative residual
  std::vector<double> u, value;
};

struct BlowupReport {
  int m = 0;
  std::string factor;  // which ψ was used
  double length = 0.0;  // ∫_0^{π/2} ψ^-1 du
  double length_error = 0.0;
  double psi_exponent = 0.0;  // ψ ~ A u^q near u = 0
  double psi_prefactor = 0.0;
  bool finite_length = false;
  PowerLawFit direct;   // ρ_{g_ψ}(ψ∂_u, ψ∂_u) from the Ricci tensor of the deformed chart
  PowerLawFit formula;  // same from the radial form of the conformal Ricci law
  double max_route_disagreement = 0.0;
};

/// Fubini–Study with m = 2 complex_dim, ψ from `factor` ("density-root" or "trivial-density").
BlowupReport completeness_and_blowup(int m, const std::string& factor = "density-root", double u_min = 1e-4,
                                     double u_max = 1e-2, int samples = 25);

PowerLawFit fit_power_law(const std::vector<double>& u, const std::vector<double>& value);

}  // namespace hml
