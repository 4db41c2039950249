#pragma once

// Built-in analytic metrics with known ground truth.
//
//   euclidean      {dim}
//   space_form     {a, b, dim}    (a + b|x|^2)^-2 g_e, alias "g_ab"
//   sphere         {dim}          charts "stereographic" (default) or "normal"
//   fubini_study   {complex_dim}  charts "affine" (default) or "normal"
//   two_d_family   {n, b}         dr^2 + r^2 (1 + b r^n)^2 dθ^2 in Cartesian form

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hml/metric.hpp"
#include "hml/radial_function.hpp"

namespace hml {

struct CatalogFacts {
  std::optional<double> sectional_curvature;  // set for space forms
  bool einstein = false;
  bool harmonic_space = false;
  std::vector<Point> harmonic_centers;  // points the metric is known to be centrally harmonic about
  std::function<double(double)> density;  // closed-form Θ_P(r) about the entry's center
  std::optional<RadialFunction> reduced_density;  // Θ_P(r)/r^(m-1) as a function of t = r^2
  std::optional<double> eigen_spread;     // s_P at the center
};

struct CatalogEntry {
  std::string family;
  std::map<std::string, double> params;
  std::string chart;
  ChartMetric metric;
  Point center;
  CatalogFacts facts;
};

using CatalogParams = std::map<std::string, double>;

/// Throws InvalidArgument for unknown families, charts, parameters or invalid values.
CatalogEntry build(const std::string& family, const CatalogParams& params, const std::string& chart = "");

std::vector<std::string> catalog_families();

namespace catalog {
CatalogEntry euclidean(int m);
CatalogEntry space_form(double a, double b, int m);
CatalogEntry sphere(int m, const std::string& chart = "stereographic");
CatalogEntry fubini_study(int complex_dim, const std::string& chart = "affine");
CatalogEntry two_d_family(int n, double b);
}  // namespace catalog

/// g = alpha I + beta x x^T + gamma (Jx)(Jx)^T with J the complex structure on pairs (x_k, y_k).
std::vector<Jet> rotational_components(std::span<const Jet> x, const Jet& alpha, const Jet& beta,
                                       const std::optional<Jet>& gamma = std::nullopt);

/// (sin r/r)^(m-1) cos r as a function of t = r^2, for t < (π/2)^2.
RadialFunction fubini_study_reduced_density(int m);

/// Radial variable of a geodesic normal chart centered at the origin: t = |x|^2 = r^2.
RadialVariable normal_radius_variable(int m);

}  // namespace hml
