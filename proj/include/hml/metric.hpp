#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hml/jet.hpp"

namespace hml {

using Point = std::vector<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// The variable a radial conformal factor is evaluated on.
///   NormalRadius: the chart is a geodesic normal chart at `center` and t = |x - center|^2 = r_P^2.
///   PoleHeight:   t = (xi^1)^2 on a round-sphere chart, with r_P = arccos(xi^1) measured from `center`.
struct RadialVariable {
  enum class Kind { NormalRadius, PoleHeight };
  Kind kind = Kind::NormalRadius;
  Point center;
  std::function<Jet(std::span<const Jet>)> t_of_x;
  /// t as a function of geodesic distance from `center`, as a univariate jet.
  std::function<Jet(const Jet&)> t_of_r;
};

/// An analytic Riemannian metric on an open coordinate chart. Immutable and
/// cheap to copy; safe to share between threads.
class ChartMetric {
 public:
  using DomainFn = std::function<bool(std::span<const double>)>;
  /// Returns the m*m components (row-major) evaluated on coordinate jets.
  using ComponentFn = std::function<std::vector<Jet>(std::span<const Jet>)>;

  ChartMetric(std::string name, int dim, DomainFn domain, ComponentFn components);

  const std::string& name() const { return impl_->name; }
  int dim() const { return impl_->dim; }
  bool in_domain(std::span<const double> x) const;

  /// Components as jets of the given order at x. Throws DomainExit outside the
  /// chart and OrderExceeded when the order cannot be supplied.
  std::vector<Jet> jets(std::span<const double> x, int order) const;
  std::vector<Jet> jets(std::span<const Jet> x) const;
  Matrix value(std::span<const double> x) const;

  std::optional<double> injectivity_radius() const { return impl_->injectivity_radius; }
  const std::optional<RadialVariable>& radial_variable() const { return impl_->radial; }

  ChartMetric with_name(std::string name) const;
  ChartMetric with_injectivity_radius(std::optional<double> iota) const;
  ChartMetric with_radial_variable(std::optional<RadialVariable> radial) const;

 private:
  struct Impl {
    std::string name;
    int dim;
    DomainFn domain;
    ComponentFn components;
    std::optional<double> injectivity_radius;
    std::optional<RadialVariable> radial;
  };
  std::shared_ptr<const Impl> impl_;
};

/// A smooth function on a chart, evaluated on coordinate jets.
class ScalarField {
 public:
  using Fn = std::function<Jet(std::span<const Jet>)>;
  ScalarField(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  Jet operator()(std::span<const Jet> x) const { return fn_(x); }
  Jet jet(std::span<const double> x, int order) const;
  double value(std::span<const double> x) const { return jet(x, 0).value(); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn fn_;
};

/// Cholesky factor L with g = L L^T; throws DegenerateMetric if g is not positive definite.
Matrix cholesky_lower(const Matrix& g);

/// |x|^2 for coordinate jets.
Jet squared_norm(std::span<const Jet> x);

/// Inverse of a symmetric matrix of jets (row-major m*m).
std::vector<Jet> invert(std::span<const Jet> g, int m);

}  // namespace hml
