#pragma once

// Pointwise curvature of a ChartMetric.
//
// Conventions (see docs/conventions.md):
//   Gamma(i,j,k) = Γ_ij^k, the coefficient of ∂_k in ∇_{∂i}∂_j.
//   R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z and R(X,Y,Z,W) = g(R(X,Y)Z, W),
//   so the unit round sphere has R(u,v,v,u) = +1 for orthonormal u, v.
//   (∇^k R)(i,j,k,l; p1..pk) stores the derivative slots after the curvature slots.

#include <span>
#include <vector>

#include "hml/metric.hpp"

namespace hml {

/// Christoffel symbols and (optionally) the lowered curvature tensor at a point.
struct PointGeometry {
  int m = 0;
  Matrix g, ginv;
  std::vector<double> gamma;    // Γ_ij^k at (i*m + j)*m + k
  std::vector<double> riemann;  // R_ijkl, empty unless requested

  double Gamma(int i, int j, int k) const { return gamma[static_cast<std::size_t>((i * m + j) * m + k)]; }
  double R(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)];
  }
};

/// Fast path used inside integrators: second-order jets only.
PointGeometry point_geometry(const ChartMetric& metric, std::span<const double> x, bool with_riemann);

struct CurvatureBundle {
  Point point;
  int m = 0;
  Matrix metric, inverse;
  std::vector<double> christoffel;                 // Γ_ij^k
  std::vector<double> riemann;                     // R_ijkl
  Matrix ricci;                                    // ρ_ij
  double scalar = 0.0;
  std::vector<std::vector<double>> nabla_riemann;  // [k-1] holds ∇^k R, m^(4+k) entries

  double R(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)];
  }
  double Gamma(int i, int j, int k) const { return christoffel[static_cast<std::size_t>((i * m + j) * m + k)]; }
  /// ∇^k R as a dense array, k = 0 returns R itself.
  const std::vector<double>& nabla(int k) const;
  int k_max() const { return static_cast<int>(nabla_riemann.size()); }
};

/// Γ_ij^k at x, flat index (i*m + j)*m + k.
std::vector<double> christoffels(const ChartMetric& metric, std::span<const double> x);

/// Curvature and its covariant derivatives up to order k_max.
CurvatureBundle curvature(const ChartMetric& metric, std::span<const double> x, int k_max = 0);

/// R(u, v, w, z) contracted from a lowered curvature array.
double contract_riemann(std::span<const double> riemann, int m, const Vector& u, const Vector& v, const Vector& w,
                        const Vector& z);

double sectional_curvature(const CurvatureBundle& bundle, const Vector& u, const Vector& v);

/// Covariant Hessian ∂_i∂_jφ − Γ_ij^k ∂_kφ.
Matrix hessian(const ChartMetric& metric, const ScalarField& phi, std::span<const double> x);

/// Frobenius norm of ρ − (scal/m) g in an orthonormal frame.
double einstein_defect(const CurvatureBundle& bundle);

/// Divergence of Ricci and half the differential of scalar curvature (needs k_max >= 1).
std::pair<Vector, Vector> contracted_bianchi(const CurvatureBundle& bundle);

}  // namespace hml
