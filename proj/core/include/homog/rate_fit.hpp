#pragma once

#include <span>

namespace homog {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root-mean-square residual of the fit in log space
  int points = 0;
};

/// Unweighted least squares of log(y) against log(x). Pairs with a
/// non-positive or non-finite entry are dropped. Throws PreconditionError when
/// fewer than `min_points` usable pairs remain.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y, int min_points = 2);

}  // namespace homog
