#include "linear_solvers.hpp"

#include <cmath>
#include <vector>

namespace homog::detail {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

CgResult pcg(const LinearMap& apply, const LinearMap& precondition, std::span<const double> b,
             std::span<double> x, double relative_tolerance, int max_iterations) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), q(n);

  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];

  const double b_norm = std::sqrt(dot(b, b));
  CgResult result;
  if (b_norm == 0.0) {
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.0;
    result.converged = true;
    return result;
  }

  precondition(r, z);
  p = z;
  double rz = dot(r, z);
  double r_norm = std::sqrt(dot(r, r));
  result.relative_residual = r_norm / b_norm;
  if (result.relative_residual <= relative_tolerance) {
    result.converged = true;
    return result;
  }

  for (int it = 1; it <= max_iterations; ++it) {
    apply(p, q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) break;  // lost positivity: operator or preconditioner not SPD on the range
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    r_norm = std::sqrt(dot(r, r));
    result.iterations = it;
    result.relative_residual = r_norm / b_norm;
    if (result.relative_residual <= relative_tolerance) {
      result.converged = true;
      return result;
    }
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return result;
}

}  // namespace homog::detail
