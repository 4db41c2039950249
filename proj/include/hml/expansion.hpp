#pragma once

// Density expansion Θ_P(ξ) ~ |ξ|^(m-1) (1 + Σ H_k(ξ)) from curvature at P.

#include <string>
#include <vector>

#include "hml/curvature.hpp"
#include "hml/series.hpp"

namespace hml {

/// J_k(ξ): g(J_k(ξ)η1, η2) = (∇^k R)(η1, ξ, ξ, η2; ξ, ..., ξ).
struct JacobiOperator {
  Vector xi;
  int k = 0;
  Matrix form;      // the bilinear form (η1, η2) ↦ g(J_k η1, η2) in coordinates
  Matrix operator_;  // the endomorphism g^-1 form^T
};

JacobiOperator jacobi(const CurvatureBundle& bundle, const Vector& xi, int k);
JacobiOperator jacobi(const ChartMetric& metric, const Point& P, const Vector& xi, int k);

struct DensityExpansion {
  Vector xi;
  std::vector<double> H;  // H[k], k = 0..6; H[0] = H[1] = 0
  std::vector<double> fitted;  // optional geodesic-engine values, same indexing
};

/// H_2..H_6 from the trace polynomials in J, J_1, ..., J_4 (J = J_0).
DensityExpansion density_coefficients(const CurvatureBundle& bundle, const Vector& xi);
DensityExpansion density_coefficients(const ChartMetric& metric, const Point& P, const Vector& xi);

/// c_n = -(n - 1)/(n + 1)!
Rational leading_coefficient(int n);

struct SeriesLine {
  std::string name;
  int power;         // power of r
  Rational expected;
  Rational obtained;
  bool ok() const { return expected == obtained; }
};

struct LeadingCoefficientCheck {
  int n = 0;
  Rational b;
  int truncation = 0;
  std::vector<SeriesLine> lines;
  Rational trace_coefficient;  // coefficient of r^(n-2) in Tr J_0(∂_r)
  Rational density_coefficient;  // H_n(∂_r) read off Θ = sqrt(f)
  Rational recovered;          // H_n / ((n-2)! [r^(n-2)] Tr J)
  Rational formula;            // leading_coefficient(n)
  bool passed = false;
};

/// Exact-rational check on the surface ds^2 = dr^2 + f dθ^2, f = (r(1 + b r^n))^2.
LeadingCoefficientCheck verify_leading_coefficient(int n, const Rational& b, int truncation = -1);

}  // namespace hml
