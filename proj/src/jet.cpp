#include "hml/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

#include "hml/errors.hpp"

namespace hml {

namespace {

constexpr int kMaxVars = 12;

std::uint64_t encode(std::span<const std::uint8_t> e) {
  std::uint64_t key = 0;
  for (auto v : e) key = (key << 4) | v;
  return key;
}

std::uint64_t encode(std::span<const int> e) {
  std::uint64_t key = 0;
  for (auto v : e) key = (key << 4) | static_cast<std::uint64_t>(v);
  return key;
}

void monomials_of_degree(int nvars, int degree, std::vector<std::uint8_t>& out) {
  // Lexicographically decreasing in the first exponent.
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(nvars), 0);
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == nvars - 1) {
      cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(remaining);
      out.insert(out.end(), cur.begin(), cur.end());
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(e);
      self(self, var + 1, remaining - e);
    }
  };
  rec(rec, 0, degree);
}

}  // namespace

struct JetLayout::Lazy {
  std::mutex mutex;
  std::array<std::unique_ptr<const std::vector<Product>>, kMaxJetOrder + 1> products;
  std::vector<std::array<std::unique_ptr<const std::vector<DerivativeTerm>>, kMaxJetOrder + 1>> derivs;
};

JetLayout::JetLayout(int nvars) : nvars_(nvars), lazy_(new Lazy) {
  block_end_.reserve(kMaxJetOrder + 1);
  for (int d = 0; d <= kMaxJetOrder; ++d) {
    monomials_of_degree(nvars, d, exps_);
    block_end_.push_back(exps_.size() / static_cast<std::size_t>(nvars));
  }
  const std::size_t n = block_end_.back();
  degree_.resize(n);
  for (int d = 0, i = 0; d <= kMaxJetOrder; ++d)
    for (; static_cast<std::size_t>(i) < block_end_[static_cast<std::size_t>(d)]; ++i) degree_[static_cast<std::size_t>(i)] = d;

  std::vector<std::pair<std::uint64_t, std::uint32_t>> kv(n);
  for (std::size_t i = 0; i < n; ++i) kv[i] = {encode(exponents(i)), static_cast<std::uint32_t>(i)};
  std::sort(kv.begin(), kv.end());
  keys_.resize(n);
  key_index_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys_[i] = kv[i].first;
    key_index_[i] = kv[i].second;
  }
  lazy_->derivs.resize(static_cast<std::size_t>(nvars));
}

const JetLayout& JetLayout::get(int nvars) {
  if (nvars < 1 || nvars > kMaxVars) throw InvalidArgument("jet: unsupported number of variables");
  static std::mutex mutex;
  static std::array<std::unique_ptr<JetLayout>, kMaxVars + 1> layouts;
  std::lock_guard lock(mutex);
  auto& slot = layouts[static_cast<std::size_t>(nvars)];
  if (!slot) slot.reset(new JetLayout(nvars));
  return *slot;
}

std::size_t JetLayout::index(std::span<const int> exps) const {
  const auto key = encode(exps);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) throw InvalidArgument("jet: monomial out of range");
  return key_index_[static_cast<std::size_t>(it - keys_.begin())];
}

std::span<const JetLayout::Product> JetLayout::products(int order) const {
  std::lock_guard lock(lazy_->mutex);
  auto& slot = lazy_->products[static_cast<std::size_t>(order)];
  if (!slot) {
    auto table = std::make_unique<std::vector<Product>>();
    std::vector<int> sum(static_cast<std::size_t>(nvars_));
    const std::size_t n = size(order);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t jmax = size(order - degree_[i]);
      auto ei = exponents(i);
      for (std::size_t j = 0; j < jmax; ++j) {
        auto ej = exponents(j);
        for (int v = 0; v < nvars_; ++v) sum[static_cast<std::size_t>(v)] = ei[static_cast<std::size_t>(v)] + ej[static_cast<std::size_t>(v)];
        table->push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                          static_cast<std::uint32_t>(index(sum))});
      }
    }
    slot = std::move(table);
  }
  return *slot;
}

std::span<const JetLayout::DerivativeTerm> JetLayout::derivative_terms(int var, int order) const {
  std::lock_guard lock(lazy_->mutex);
  auto& slot = lazy_->derivs[static_cast<std::size_t>(var)][static_cast<std::size_t>(order)];
  if (!slot) {
    auto table = std::make_unique<std::vector<DerivativeTerm>>();
    std::vector<int> e(static_cast<std::size_t>(nvars_));
    for (std::size_t i = 0; i < size(order); ++i) {
      auto ei = exponents(i);
      if (ei[static_cast<std::size_t>(var)] == 0) continue;
      std::copy(ei.begin(), ei.end(), e.begin());
      e[static_cast<std::size_t>(var)] -= 1;
      table->push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(index(e)),
                        static_cast<double>(ei[static_cast<std::size_t>(var)])});
    }
    slot = std::move(table);
  }
  return *slot;
}

// ---------------------------------------------------------------------------

Jet::Jet(int nvars, int order) : layout_(&JetLayout::get(nvars)), order_(order) {
  if (order < 0 || order > kMaxJetOrder)
    throw OrderExceeded("jet order " + std::to_string(order) + " exceeds the supported maximum " +
                        std::to_string(kMaxJetOrder));
  c_.assign(layout_->size(order), 0.0);
}

Jet Jet::constant(int nvars, int order, double value) {
  Jet j(nvars, order);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int nvars, int order, int var, double value) {
  Jet j(nvars, order);
  j.c_[0] = value;
  if (order >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
  return j;
}

std::vector<Jet> Jet::variables(std::span<const double> point, int order) {
  const int n = static_cast<int>(point.size());
  std::vector<Jet> xs;
  xs.reserve(point.size());
  for (int i = 0; i < n; ++i) xs.push_back(variable(n, order, i, point[static_cast<std::size_t>(i)]));
  return xs;
}

double Jet::partial(std::span<const int> multi_index) const {
  int deg = 0;
  double fact = 1.0;
  for (int a : multi_index) {
    deg += a;
    for (int k = 2; k <= a; ++k) fact *= k;
  }
  if (deg > order_) throw OrderExceeded("jet: derivative order exceeds jet order");
  return c_[layout_->index(multi_index)] * fact;
}

double Jet::d(int i) const {
  if (order_ < 1) throw OrderExceeded("jet: first derivative of an order-0 jet");
  return c_[1 + static_cast<std::size_t>(i)];
}

double Jet::d(int i, int j) const {
  std::array<int, kMaxVars> e{};
  e[static_cast<std::size_t>(i)] += 1;
  e[static_cast<std::size_t>(j)] += 1;
  return partial(std::span<const int>(e.data(), static_cast<std::size_t>(nvars())));
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r = *this;
  r.order_ = order;
  r.c_.resize(layout_->size(order));
  return r;
}

Jet Jet::derivative(int var) const {
  if (order_ < 1) throw OrderExceeded("jet: cannot differentiate an order-0 jet");
  Jet r(nvars(), order_ - 1);
  for (const auto& t : layout_->derivative_terms(var, order_)) r.c_[t.dst] += t.factor * c_[t.src];
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int k = std::min(a.order_, b.order_);
  Jet r(a.nvars(), k);
  for (const auto& p : a.layout_->products(k)) r.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
  return r;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }
Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}
Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}
Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}
Jet& Jet::operator/=(double s) {
  for (auto& v : c_) v /= s;
  return *this;
}
Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

// ---------------------------------------------------------------------------

Jet compose(const Jet& x, std::span<const double> taylor) {
  const int k = x.order();
  if (static_cast<int>(taylor.size()) < k + 1) throw OrderExceeded("compose: too few Taylor coefficients");
  Jet delta = x;
  delta.coeffs()[0] = 0.0;
  Jet r = Jet::constant(x.nvars(), k, taylor[static_cast<std::size_t>(k)]);
  for (int n = k - 1; n >= 0; --n) {
    r = r * delta;
    r += taylor[static_cast<std::size_t>(n)];
  }
  return r;
}

namespace {

std::vector<double> pow_taylor(double x0, double alpha, int k) {
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  double coef = std::pow(x0, alpha);
  for (int n = 0; n <= k; ++n) {
    t[static_cast<std::size_t>(n)] = coef;
    coef *= (alpha - n) / ((n + 1) * x0);
  }
  return t;
}

}  // namespace

Jet reciprocal(const Jet& x) {
  const double x0 = x.value();
  if (x0 == 0.0) throw InvalidArgument("jet: reciprocal of a jet with zero value");
  const int k = x.order();
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  double c = 1.0 / x0;
  for (int n = 0; n <= k; ++n) {
    t[static_cast<std::size_t>(n)] = c;
    c *= -1.0 / x0;
  }
  return compose(x, t);
}

Jet exp(const Jet& x) {
  const int k = x.order();
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  double c = std::exp(x.value());
  for (int n = 0; n <= k; ++n) {
    t[static_cast<std::size_t>(n)] = c;
    c /= (n + 1);
  }
  return compose(x, t);
}

Jet log(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw InvalidArgument("jet: log of a nonpositive value");
  const int k = x.order();
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  t[0] = std::log(x0);
  double p = 1.0;
  for (int n = 1; n <= k; ++n) {
    p /= x0;
    t[static_cast<std::size_t>(n)] = ((n % 2) ? 1.0 : -1.0) * p / n;
  }
  return compose(x, t);
}

Jet pow(const Jet& x, double exponent) {
  if (!(x.value() > 0.0)) {
    if (x.value() == 0.0 && exponent == std::floor(exponent) && exponent >= 0) {
      Jet r = Jet::constant(x.nvars(), x.order(), 1.0);
      for (int i = 0; i < static_cast<int>(exponent); ++i) r = r * x;
      return r;
    }
    throw InvalidArgument("jet: pow of a nonpositive value");
  }
  return compose(x, pow_taylor(x.value(), exponent, x.order()));
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet sin(const Jet& x) {
  const int k = x.order();
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cyc[4] = {s, c, -s, -c};
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  double f = 1.0;
  for (int n = 0; n <= k; ++n) {
    if (n > 0) f *= n;
    t[static_cast<std::size_t>(n)] = cyc[n % 4] / f;
  }
  return compose(x, t);
}

Jet cos(const Jet& x) {
  const int k = x.order();
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cyc[4] = {c, -s, -c, s};
  std::vector<double> t(static_cast<std::size_t>(k) + 1);
  double f = 1.0;
  for (int n = 0; n <= k; ++n) {
    if (n > 0) f *= n;
    t[static_cast<std::size_t>(n)] = cyc[n % 4] / f;
  }
  return compose(x, t);
}

Jet square(const Jet& x) { return x * x; }

Jet dot(std::span<const Jet> a, std::span<const Jet> b) {
  Jet r = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

}  // namespace hml
