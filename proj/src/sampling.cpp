#include "hml/sampling.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

#include "hml/errors.hpp"

namespace hml {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(int base, long index) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

std::vector<Vector> sphere_directions(int m, int count) {
  if (m < 1 || m > 12) throw InvalidArgument("sphere_directions: dimension out of range");
  if (count < 1) throw InvalidArgument("sphere_directions: count must be positive");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  // Skip the first few Halton points, which sit close together near the centre of the cube.
  for (long i = 1; static_cast<int>(out.size()) < count; ++i) {
    Vector z(m);
    for (int d = 0; d < m; ++d) {
      const double u = radical_inverse(kPrimes[d], i + 16);
      z(d) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
    }
    const double n = z.norm();
    if (n < 1e-8) continue;
    out.push_back(z / n);
  }
  return out;
}

std::vector<Vector> unit_directions(const Matrix& g, int count) {
  const Matrix l = cholesky_lower(g);
  auto dirs = sphere_directions(static_cast<int>(g.rows()), count);
  for (auto& u : dirs) u = l.transpose().triangularView<Eigen::Upper>().solve(u);
  return dirs;
}

Matrix orthonormal_complement(const Matrix& g, const Vector& theta) {
  const int m = static_cast<int>(g.rows());
  const Matrix l = cholesky_lower(g);
  // Work in the orthonormal coordinates w = L^T v.
  const Vector w = l.transpose() * theta;
  Eigen::HouseholderQR<Matrix> qr(Matrix(w / w.norm()));
  const Matrix q = qr.householderQ() * Matrix::Identity(m, m);
  const Matrix comp = q.rightCols(m - 1);
  return l.transpose().triangularView<Eigen::Upper>().solve(comp);
}

std::vector<double> linear_radii(double r_min, double r_max, int n) {
  if (n < 1) throw InvalidArgument("linear_radii: n must be positive");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = n == 1 ? r_max : r_min + (r_max - r_min) * i / (n - 1);
  return r;
}

std::vector<double> geometric_radii(double r_min, double r_max, int n) {
  if (n < 1 || !(r_min > 0) || !(r_max >= r_min)) throw InvalidArgument("geometric_radii: bad range");
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    r[static_cast<std::size_t>(i)] = n == 1 ? r_max : r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n - 1));
  return r;
}

}  // namespace hml
