#pragma once

// Geodesics from a center P together with their normal Jacobi fields.
//
// Along γ(r) = exp_P(rθ) we integrate
//   x'' = -Γ(x', x'),  E_a' = -Γ(x', E_a),  A'' = -R̃ A,  R̃_ab = R(E_a, x', x', E_b)
// with A(0) = 0, A'(0) = I. Then Θ = det A and Ξ = Tr(A' A^-1).

#include <optional>
#include <string>
#include <vector>

#include "hml/metric.hpp"

namespace hml {

struct IntegratorConfig {
  int steps = 2000;            // fixed RK4 steps over the longest requested radius
  double abs_tol = 1e-10;      // adaptive fallback tolerances
  double rel_tol = 1e-9;
  double energy_tol = 1e-9;    // |‖x'‖_g - 1| above this triggers the adaptive fallback
  bool force_adaptive = false;
  double start_epsilon = 0.0;  // > 0: restart A, A' at r = ε from their Taylor series
};

struct PolarDensitySample {
  Point center;
  Vector direction;  // g(P)-unit coordinate vector θ
  double r = 0.0;
  Point endpoint;
  Vector velocity;
  Matrix frame;      // m x (m-1), parallel g-orthonormal frame at the endpoint
  Matrix A, dA;      // (m-1) x (m-1) in the parallel frame
  double theta = 0.0;  // Θ = det A
  double reduced_minus_one = 0.0;  // Θ / r^(m-1) - 1, kept to full relative precision
  double xi = 0.0;     // Ξ = Tr(A' A^-1)
  double xi_prime = 0.0;  // Ξ' = -Tr(L^2) - ρ(x', x') with L = A' A^-1
  double speed_drift = 0.0;
  bool conjugate = false;  // det A <= 0 reached
  bool adaptive = false;   // adaptive fallback was used
};

/// det(I + M) - 1 without cancellation for small M.
double det_identity_plus_minus_one(const Matrix& M);

/// Samples at increasing radii along one geodesic.
std::vector<PolarDensitySample> shoot_profile(const ChartMetric& metric, const Point& center, const Vector& direction,
                                              const std::vector<double>& radii, const IntegratorConfig& config = {});

PolarDensitySample shoot(const ChartMetric& metric, const Point& center, const Vector& direction, double r,
                         const IntegratorConfig& config = {});

struct DensityTable {
  Point center;
  std::vector<double> radii;
  std::vector<Vector> directions;
  std::vector<std::vector<PolarDensitySample>> samples;  // [direction][radius]
  double theta(std::size_t dir, std::size_t ri) const { return samples[dir][ri].theta; }
  double xi(std::size_t dir, std::size_t ri) const { return samples[dir][ri].xi; }
};

/// Shoots every direction (in parallel, `threads` = 0 means hardware concurrency).
DensityTable density_profile(const ChartMetric& metric, const Point& center, const std::vector<Vector>& directions,
                             const std::vector<double>& radii, const IntegratorConfig& config = {}, int threads = 0);

/// (max - min) / mean|.| of a column.
double relative_spread(const std::vector<double>& values);

struct HarmonicityConfig {
  std::vector<double> radii;  // empty: chosen from the injectivity radius
  int directions = 20;
  double tolerance = 1e-6;
  IntegratorConfig integrator;
  int threads = 0;
};

struct HarmonicityReport {
  enum class Verdict { Harmonic, NotHarmonic, Inconclusive };
  Point center;
  std::vector<double> radii;
  std::vector<double> theta_spread, xi_spread;  // per radius
  double max_theta_spread = 0.0, max_xi_spread = 0.0;
  double einstein_defect = 0.0;
  double tolerance = 0.0;
  double max_safe_radius = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;
  DensityTable table;
};

const char* to_string(HarmonicityReport::Verdict v);

std::vector<double> default_radii(const ChartMetric& metric);

HarmonicityReport centrally_harmonic_test(const ChartMetric& metric, const Point& center,
                                          const HarmonicityConfig& config = {});

/// f(r_i) = ∫_{r0}^{r_i} Θ^-1 ds from radial samples (r, Θ, Ξ), using the Hermite-corrected trapezoid
/// rule with (Θ^-1)' = -Ξ Θ^-1. r0 must be one of the sample radii.
std::vector<double> radial_harmonic(const std::vector<double>& r, const std::vector<double>& theta,
                                    const std::vector<double>& xi, double r0);

/// Quintic Hermite version using Ξ' as well, (Θ^-1)'' = (Ξ^2 - Ξ') Θ^-1.
std::vector<double> radial_harmonic(const std::vector<double>& r, const std::vector<double>& theta,
                                    const std::vector<double>& xi, const std::vector<double>& xi_prime, double r0);

/// Same, from a density table (quintic rule); refuses (NonRadial) if the spread of Θ exceeds `tolerance`.
std::vector<double> radial_harmonic(const DensityTable& table, double r0, double tolerance = 1e-6);

struct SphereShapeSample {
  PolarDensitySample sample;
  Matrix L;                  // shape operator A' A^-1 in the parallel frame, Tr L = +Ξ
  double asymmetry = 0.0;    // ‖L - L^T‖ before symmetrization
  double umbilicity_defect = 0.0;
  Matrix jacobi_reduced;     // J̃_0(θ) at P on θ^⊥, in the initial frame
  double jacobi_min = 0.0, jacobi_max = 0.0;
};

/// Reduced Jacobi operator R(E_a, θ, θ, E_b) at P with E the initial frame for θ.
Matrix reduced_jacobi(const ChartMetric& metric, const Point& center, const Vector& direction);

SphereShapeSample second_fundamental_form(const ChartMetric& metric, const Point& center, const Vector& direction,
                                          double r, const IntegratorConfig& config = {});

struct EigenSpread {
  double s = 0.0;          // min over directions of (max - min eigenvalue)
  Vector argmin_direction;
  double max_gap = 0.0;
};

EigenSpread eigen_spread(const ChartMetric& metric, const Point& center, int directions = 64);

}  // namespace hml
