#pragma once

#include <functional>
#include <span>

namespace homog::detail {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// map. For singular maps the caller supplies b in the range and a
/// preconditioner whose output stays in the range. Reductions run in index
/// order so results are bitwise reproducible.
CgResult pcg(const LinearMap& apply, const LinearMap& precondition, std::span<const double> b,
             std::span<double> x, double relative_tolerance, int max_iterations);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace homog::detail
