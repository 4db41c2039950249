#include "hml/metric.hpp"

#include <cmath>

#include "hml/errors.hpp"

namespace hml {

ChartMetric::ChartMetric(std::string name, int dim, DomainFn domain, ComponentFn components) {
  if (dim < 1) throw InvalidArgument("metric dimension must be positive");
  impl_ = std::make_shared<const Impl>(Impl{std::move(name), dim, std::move(domain), std::move(components), {}, {}});
}

bool ChartMetric::in_domain(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return !impl_->domain || impl_->domain(x);
}

std::vector<Jet> ChartMetric::jets(std::span<const double> x, int order) const {
  if (!in_domain(x)) throw DomainExit("point outside the domain of " + name(), 0.0);
  if (order > kMaxJetOrder)
    throw OrderExceeded("derivative order " + std::to_string(order) + " exceeds the supported maximum " +
                        std::to_string(kMaxJetOrder));
  const auto xs = Jet::variables(x, order);
  return impl_->components(xs);
}

std::vector<Jet> ChartMetric::jets(std::span<const Jet> x) const { return impl_->components(x); }

Matrix ChartMetric::value(std::span<const double> x) const {
  const auto g = jets(x, 0);
  const int m = dim();
  Matrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = g[static_cast<std::size_t>(i * m + j)].value();
  return out;
}

ChartMetric ChartMetric::with_name(std::string name) const {
  ChartMetric c = *this;
  auto impl = *impl_;
  impl.name = std::move(name);
  c.impl_ = std::make_shared<const Impl>(std::move(impl));
  return c;
}

ChartMetric ChartMetric::with_injectivity_radius(std::optional<double> iota) const {
  ChartMetric c = *this;
  auto impl = *impl_;
  impl.injectivity_radius = iota;
  c.impl_ = std::make_shared<const Impl>(std::move(impl));
  return c;
}

ChartMetric ChartMetric::with_radial_variable(std::optional<RadialVariable> radial) const {
  ChartMetric c = *this;
  auto impl = *impl_;
  impl.radial = std::move(radial);
  c.impl_ = std::make_shared<const Impl>(std::move(impl));
  return c;
}

Jet ScalarField::jet(std::span<const double> x, int order) const {
  const auto xs = Jet::variables(x, order);
  return fn_(xs);
}

Matrix cholesky_lower(const Matrix& g) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success || !g.allFinite())
    throw DegenerateMetric("degenerate metric: Cholesky factorization failed");
  Matrix l = llt.matrixL();
  const double scale = g.diagonal().cwiseAbs().maxCoeff();
  if (l.diagonal().minCoeff() <= 1e-14 * std::sqrt(scale)) throw DegenerateMetric("degenerate metric: near-singular");
  return l;
}

Jet squared_norm(std::span<const Jet> x) {
  Jet t = x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) t += x[i] * x[i];
  return t;
}

std::vector<Jet> invert(std::span<const Jet> g, int m) {
  // Gauss-Jordan on jets, pivoting on constant terms.
  std::vector<Jet> a(g.begin(), g.end());
  std::vector<Jet> inv;
  inv.reserve(static_cast<std::size_t>(m * m));
  const int nv = g[0].nvars(), order = g[0].order();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) inv.push_back(Jet::constant(nv, order, i == j ? 1.0 : 0.0));
  auto at = [m](std::vector<Jet>& v, int i, int j) -> Jet& { return v[static_cast<std::size_t>(i * m + j)]; };
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(at(a, r, col).value()) > std::abs(at(a, piv, col).value())) piv = r;
    if (at(a, piv, col).value() == 0.0) throw DegenerateMetric("degenerate metric: singular matrix");
    if (piv != col)
      for (int j = 0; j < m; ++j) {
        std::swap(at(a, piv, j), at(a, col, j));
        std::swap(at(inv, piv, j), at(inv, col, j));
      }
    const Jet p = reciprocal(at(a, col, col));
    for (int j = 0; j < m; ++j) {
      at(a, col, j) = at(a, col, j) * p;
      at(inv, col, j) = at(inv, col, j) * p;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const Jet f = at(a, r, col);
      bool zero = true;
      for (double c : f.coeffs()) zero = zero && c == 0.0;
      if (zero) continue;
      for (int j = 0; j < m; ++j) {
        at(a, r, j) -= f * at(a, col, j);
        at(inv, r, j) -= f * at(inv, col, j);
      }
    }
  }
  return inv;
}

}  // namespace hml
