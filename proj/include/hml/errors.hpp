#pragma once

#include <stdexcept>
#include <string>

namespace hml {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Metric failed Cholesky factorization at an evaluation point.
class DegenerateMetric : public Error {
 public:
  using Error::Error;
};

/// A derivative order beyond what the metric (or the jet engine) supports was requested.
class OrderExceeded : public Error {
 public:
  using Error::Error;
};

class DegeneratePlane : public Error {
 public:
  using Error::Error;
};

/// A geodesic left the chart domain. `last_valid_r` is the largest radius reached inside it.
class DomainExit : public Error {
 public:
  DomainExit(const std::string& what, double last_valid_r)
      : Error(what), last_valid_r_(last_valid_r) {}
  double last_valid_r() const noexcept { return last_valid_r_; }

 private:
  double last_valid_r_;
};

class ConjugatePoint : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  IllConditioned(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Input profile is not radial enough for an operation that assumes radiality.
class NonRadial : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

}  // namespace hml
