#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

/// Point or vector in R^d for d in {1, 2}. Entries past `dim` are kept at zero.
using Vec = std::array<double, 2>;

/// Row-major 2x2 matrix; for d = 1 only entry (0,0) is meaningful.
using Mat = std::array<double, 4>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1]}; }

inline Vec matvec(const Mat& m, const Vec& v) {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

inline Mat identity_mat(double s = 1.0) { return {s, 0.0, 0.0, s}; }

// Error hierarchy. Every failure the library reports is one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configuration document is malformed or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The requested evaluation does not exist for this model (e.g. no potential).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Nonlinear or linear solver did not reach its tolerance. Carries the best
/// iterate seen so callers can inspect or restart from it.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double best_residual, std::vector<double> best_iterate = {})
      : Error(what), best_residual_(best_residual), best_iterate_(std::move(best_iterate)) {}

  double best_residual() const noexcept { return best_residual_; }
  const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }

 private:
  double best_residual_;
  std::vector<double> best_iterate_;
};

}  // namespace homog
