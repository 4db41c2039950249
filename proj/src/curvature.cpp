#include "hml/curvature.hpp"

#include <cmath>

#include "hml/errors.hpp"

namespace hml {

namespace {

std::size_t idx3(int m, int i, int j, int k) { return static_cast<std::size_t>((i * m + j) * m + k); }
std::size_t idx4(int m, int i, int j, int k, int l) { return static_cast<std::size_t>(((i * m + j) * m + k) * m + l); }

std::size_t ipow(int m, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(m);
  return r;
}

Matrix to_matrix(const std::vector<Jet>& g, int m) {
  Matrix out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = g[static_cast<std::size_t>(i * m + j)].value();
  return out;
}

Matrix checked_inverse(const Matrix& g) {
  cholesky_lower(g);
  return g.inverse();
}

}  // namespace

PointGeometry point_geometry(const ChartMetric& metric, std::span<const double> x, bool with_riemann) {
  const int m = metric.dim();
  const auto gj = metric.jets(x, with_riemann ? 2 : 1);
  PointGeometry pg;
  pg.m = m;
  pg.g = to_matrix(gj, m);
  pg.ginv = checked_inverse(pg.g);

  // dg[p][i][j] = ∂_p g_ij
  std::vector<double> dg(ipow(m, 3));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int p = 0; p < m; ++p) dg[idx3(m, p, i, j)] = gj[static_cast<std::size_t>(i * m + j)].d(p);

  // Lowered Γ_ijl = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
  std::vector<double> low(ipow(m, 3));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l)
        low[idx3(m, i, j, l)] = 0.5 * (dg[idx3(m, i, j, l)] + dg[idx3(m, j, i, l)] - dg[idx3(m, l, i, j)]);
  pg.gamma.assign(ipow(m, 3), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int l = 0; l < m; ++l) s += pg.ginv(k, l) * low[idx3(m, i, j, l)];
        pg.gamma[idx3(m, i, j, k)] = s;
      }
  if (!with_riemann) return pg;

  // ddg[p][q][i][j] = ∂_p∂_q g_ij
  std::vector<double> ddg(ipow(m, 4));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int p = 0; p < m; ++p)
        for (int q = p; q < m; ++q) {
          const double v = gj[static_cast<std::size_t>(i * m + j)].d(p, q);
          ddg[idx4(m, p, q, i, j)] = v;
          ddg[idx4(m, q, p, i, j)] = v;
        }
  // ∂_p Γ^k_ij = g^{kl}(∂_p Γ_ijl − ∂_p g_lq Γ^q_ij)
  std::vector<double> dgamma(ipow(m, 4));  // [p][i][j][k]
  std::vector<double> tmp(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        for (int l = 0; l < m; ++l) {
          double dlow = 0.5 * (ddg[idx4(m, p, i, j, l)] + ddg[idx4(m, p, j, i, l)] - ddg[idx4(m, p, l, i, j)]);
          for (int q = 0; q < m; ++q) dlow -= dg[idx3(m, p, l, q)] * pg.gamma[idx3(m, i, j, q)];
          tmp[static_cast<std::size_t>(l)] = dlow;
        }
        for (int k = 0; k < m; ++k) {
          double s = 0.0;
          for (int l = 0; l < m; ++l) s += pg.ginv(k, l) * tmp[static_cast<std::size_t>(l)];
          dgamma[idx4(m, p, i, j, k)] = s;
        }
      }
  // R^l_ijk = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^p_jk Γ^l_ip − Γ^p_ik Γ^l_jp, then lower l.
  std::vector<double> rup(ipow(m, 4));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = dgamma[idx4(m, i, j, k, l)] - dgamma[idx4(m, j, i, k, l)];
          for (int p = 0; p < m; ++p)
            s += pg.gamma[idx3(m, j, k, p)] * pg.gamma[idx3(m, i, p, l)] -
                 pg.gamma[idx3(m, i, k, p)] * pg.gamma[idx3(m, j, p, l)];
          rup[idx4(m, i, j, k, l)] = s;
        }
  pg.riemann.assign(ipow(m, 4), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = 0.0;
          for (int q = 0; q < m; ++q) s += pg.g(l, q) * rup[idx4(m, i, j, k, q)];
          pg.riemann[idx4(m, i, j, k, l)] = s;
        }
  return pg;
}

std::vector<double> christoffels(const ChartMetric& metric, std::span<const double> x) {
  return point_geometry(metric, x, false).gamma;
}

const std::vector<double>& CurvatureBundle::nabla(int k) const {
  if (k == 0) return riemann;
  if (k < 0 || k > k_max()) throw OrderExceeded("∇^k R not computed for k = " + std::to_string(k));
  return nabla_riemann[static_cast<std::size_t>(k - 1)];
}

CurvatureBundle curvature(const ChartMetric& metric, std::span<const double> x, int k_max) {
  if (k_max < 0) throw InvalidArgument("k_max must be nonnegative");
  const int order = k_max + 2;
  if (order > kMaxJetOrder)
    throw OrderExceeded("curvature: ∇^" + std::to_string(k_max) + "R needs metric derivatives of order " +
                        std::to_string(order) + ", beyond the supported " + std::to_string(kMaxJetOrder));
  const int m = metric.dim();
  CurvatureBundle b;
  b.point.assign(x.begin(), x.end());
  b.m = m;

  if (k_max == 0) {
    auto pg = point_geometry(metric, x, true);
    b.metric = pg.g;
    b.inverse = pg.ginv;
    b.christoffel = std::move(pg.gamma);
    b.riemann = std::move(pg.riemann);
  } else {
    const auto g = metric.jets(x, order);
    b.metric = to_matrix(g, m);
    checked_inverse(b.metric);
    const auto ginv = invert(g, m);
    b.inverse = to_matrix(ginv, m);

    std::vector<Jet> dg;  // ∂_p g_ij at [p][i][j], order-1
    dg.reserve(ipow(m, 3));
    for (int p = 0; p < m; ++p)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) dg.push_back(g[static_cast<std::size_t>(i * m + j)].derivative(p));
    std::vector<Jet> gamma;  // Γ^k_ij, order-1
    gamma.reserve(ipow(m, 3));
    std::vector<Jet> low;
    low.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        low.clear();
        for (int l = 0; l < m; ++l)
          low.push_back(0.5 * (dg[idx3(m, i, j, l)] + dg[idx3(m, j, i, l)] - dg[idx3(m, l, i, j)]));
        for (int k = 0; k < m; ++k) {
          Jet s = ginv[static_cast<std::size_t>(k * m)] * low[0];
          for (int l = 1; l < m; ++l) s += ginv[static_cast<std::size_t>(k * m + l)] * low[static_cast<std::size_t>(l)];
          gamma.push_back(std::move(s));
        }
      }
    // R^l_ijk as jets of order-2.
    std::vector<Jet> rup;
    rup.reserve(ipow(m, 4));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            Jet s = gamma[idx3(m, j, k, l)].derivative(i) - gamma[idx3(m, i, k, l)].derivative(j);
            for (int p = 0; p < m; ++p)
              s += gamma[idx3(m, j, k, p)] * gamma[idx3(m, i, p, l)] - gamma[idx3(m, i, k, p)] * gamma[idx3(m, j, p, l)];
            rup.push_back(std::move(s));
          }
    std::vector<Jet> tensor;
    tensor.reserve(ipow(m, 4));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            Jet s = g[static_cast<std::size_t>(l * m)] * rup[idx4(m, i, j, k, 0)];
            for (int q = 1; q < m; ++q) s += g[static_cast<std::size_t>(l * m + q)] * rup[idx4(m, i, j, k, q)];
            tensor.push_back(std::move(s));
          }
    b.christoffel.resize(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) b.christoffel[i] = gamma[i].value();
    b.riemann.resize(tensor.size());
    for (std::size_t i = 0; i < tensor.size(); ++i) b.riemann[i] = tensor[i].value();

    // Iterated covariant differentiation; each step appends one slot and drops one jet order.
    int rank = 4;
    for (int k = 1; k <= k_max; ++k) {
      const int out_order = order - 2 - k;
      std::vector<Jet> gam;
      gam.reserve(gamma.size());
      for (const auto& gj : gamma) gam.push_back(gj.truncated(out_order));
      const std::size_t n_in = tensor.size();
      std::vector<Jet> next;
      next.reserve(n_in * static_cast<std::size_t>(m));
      std::vector<int> digits(static_cast<std::size_t>(rank));
      for (std::size_t flat = 0; flat < n_in; ++flat) {
        std::size_t rem = flat;
        for (int s = rank - 1; s >= 0; --s) {
          digits[static_cast<std::size_t>(s)] = static_cast<int>(rem % static_cast<std::size_t>(m));
          rem /= static_cast<std::size_t>(m);
        }
        for (int p = 0; p < m; ++p) {
          Jet s = tensor[flat].derivative(p);
          for (int slot = 0; slot < rank; ++slot) {
            const int is = digits[static_cast<std::size_t>(slot)];
            const std::size_t stride = ipow(m, rank - 1 - slot);
            const std::size_t base = flat - static_cast<std::size_t>(is) * stride;
            for (int q = 0; q < m; ++q)
              s -= gam[idx3(m, p, is, q)] * tensor[base + static_cast<std::size_t>(q) * stride];
          }
          next.push_back(std::move(s));
        }
      }
      tensor = std::move(next);
      ++rank;
      std::vector<double> vals(tensor.size());
      for (std::size_t i = 0; i < tensor.size(); ++i) vals[i] = tensor[i].value();
      b.nabla_riemann.push_back(std::move(vals));
    }
  }

  b.ricci = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i)
        for (int l = 0; l < m; ++l) s += b.inverse(i, l) * b.R(i, j, k, l);
      b.ricci(j, k) = s;
    }
  b.scalar = (b.inverse.cwiseProduct(b.ricci)).sum();
  return b;
}

double contract_riemann(std::span<const double> riemann, int m, const Vector& u, const Vector& v, const Vector& w,
                        const Vector& z) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    if (u(i) == 0.0) continue;
    for (int j = 0; j < m; ++j) {
      if (v(j) == 0.0) continue;
      for (int k = 0; k < m; ++k) {
        if (w(k) == 0.0) continue;
        const double c = u(i) * v(j) * w(k);
        for (int l = 0; l < m; ++l) s += c * z(l) * riemann[idx4(m, i, j, k, l)];
      }
    }
  }
  return s;
}

double sectional_curvature(const CurvatureBundle& bundle, const Vector& u, const Vector& v) {
  const auto& g = bundle.metric;
  const double uu = u.dot(g * u), vv = v.dot(g * v), uv = u.dot(g * v);
  const double area2 = uu * vv - uv * uv;
  if (!(area2 > 1e-14 * uu * vv)) throw DegeneratePlane("sectional curvature: vectors do not span a plane");
  return contract_riemann(bundle.riemann, bundle.m, u, v, v, u) / area2;
}

Matrix hessian(const ChartMetric& metric, const ScalarField& phi, std::span<const double> x) {
  const int m = metric.dim();
  const auto gamma = christoffels(metric, x);
  const Jet f = phi.jet(x, 2);
  Matrix h(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = f.d(i, j);
      for (int k = 0; k < m; ++k) s -= gamma[idx3(m, i, j, k)] * f.d(k);
      h(i, j) = s;
    }
  return 0.5 * (h + h.transpose());
}

double einstein_defect(const CurvatureBundle& bundle) {
  const Matrix l = cholesky_lower(bundle.metric);
  const Matrix linv = l.inverse();
  const Matrix rho = linv * bundle.ricci * linv.transpose();
  const int m = bundle.m;
  return (rho - (bundle.scalar / m) * Matrix::Identity(m, m)).norm();
}

std::pair<Vector, Vector> contracted_bianchi(const CurvatureBundle& bundle) {
  const int m = bundle.m;
  const auto& nr = bundle.nabla(1);  // (∇R)_{ijkl;p}
  auto at = [&](int i, int j, int k, int l, int p) {
    return nr[static_cast<std::size_t>((((i * m + j) * m + k) * m + l) * m + p)];
  };
  // ∇_p ρ_jk = g^{il} ∇_p R_ijkl
  std::vector<double> drho(ipow(m, 3), 0.0);  // [j][k][p]
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      for (int p = 0; p < m; ++p) {
        double s = 0.0;
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < m; ++l) s += bundle.inverse(i, l) * at(i, j, k, l, p);
        drho[idx3(m, j, k, p)] = s;
      }
  Vector div = Vector::Zero(m), half_dscal = Vector::Zero(m);
  for (int j = 0; j < m; ++j) {
    double s = 0.0, t = 0.0;
    for (int k = 0; k < m; ++k)
      for (int p = 0; p < m; ++p) {
        s += bundle.inverse(p, k) * drho[idx3(m, k, j, p)];
        t += bundle.inverse(k, p) * drho[idx3(m, k, p, j)];
      }
    div(j) = s;
    half_dscal(j) = 0.5 * t;
  }
  return {div, half_dscal};
}

}  // namespace hml
