#pragma once

// Deterministic, seedless sampling of directions and radii.

#include <vector>

#include "hml/metric.hpp"

namespace hml {

/// Euclidean unit vectors in R^m from a Halton sequence pushed through the
/// inverse normal CDF. The same (m, count) always yields the same list.
std::vector<Vector> sphere_directions(int m, int count);

/// Unit vectors for the metric g at a point: θ = L^-T u with g = L L^T.
std::vector<Vector> unit_directions(const Matrix& g, int count);

/// Columns E_1..E_(m-1) completing θ to a g-orthonormal basis.
Matrix orthonormal_complement(const Matrix& g, const Vector& theta);

std::vector<double> linear_radii(double r_min, double r_max, int n);
std::vector<double> geometric_radii(double r_min, double r_max, int n);

}  // namespace hml
