#pragma once

#include <stdexcept>
#include <string>

namespace fracwick {

// Base of every error the library throws. Callers that only care about
// "the computation could not proceed" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// phi-calculus called with H <= 1/2.
class LongMemoryRequired : public Error {
 public:
  using Error::Error;
};

class DiagonalSingularity : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class SingularCovariance : public Error {
 public:
  SingularCovariance(const std::string& what, double smallest_eigenvalue)
      : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

class EmbeddingFailure : public Error {
 public:
  EmbeddingFailure(const std::string& what, double most_negative)
      : Error(what), most_negative_(most_negative) {}
  double most_negative_eigenvalue() const noexcept { return most_negative_; }

 private:
  double most_negative_;
};

class DriftBlowup : public Error {
 public:
  DriftBlowup(const std::string& what, double t, double x)
      : Error(what), t_(t), x_(x) {}
  double time() const noexcept { return t_; }
  double state() const noexcept { return x_; }

 private:
  double t_;
  double x_;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_delta)
      : Error(what), last_delta_(last_delta) {}
  double last_delta() const noexcept { return last_delta_; }

 private:
  double last_delta_;
};

class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracwick
