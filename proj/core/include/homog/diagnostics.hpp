#pragma once

// Ball-average diagnostics on domain solutions: Caccioppoli and reverse
// Holder ratios, higher regularity of u0, and large-scale gradient decay.
// Ball averages are nodal means over nodes with |x - center| <= r.

#include <vector>

#include "homog/domain_solver.hpp"
#include "homog/rate_fit.hpp"

namespace homog {

struct Ball {
  Vec center{0.5, 0.5};
  double r = 0.25;
};

struct BallRatio {
  Ball ball;
  double ratio = 0.0;
  bool degenerate = false;  ///< denominator vanished
};

/// r (avg_{B_r} |grad u|^p)^(1/p) / (avg_{B_2r} |u - c|^p)^(1/p), c the B_2r mean.
/// Throws PreconditionError when B_2r leaves the box.
std::vector<BallRatio> caccioppoli_check(const Solution& s, const std::vector<Ball>& balls, double p);

/// (avg_{B_r} |grad u|^q)^(1/q) / (avg_{B_2r} |grad u|^p)^(1/p), q = p (1 + delta).
std::vector<BallRatio> meyers_check(const Solution& s, const std::vector<Ball>& balls, double p, double delta);

/// r^2 avg_{B_r} |D^2 u|^2 w / avg_{B_2r} |grad u|^p, w = (mu^2 + |grad u|^2)^((p-2)/2).
/// The floor mu keeps the weight finite where grad u vanishes for p < 2.
std::vector<BallRatio> grad_regularity_check(const Solution& u0, const std::vector<Ball>& balls, double p,
                                             double mu_floor = 1e-8);

struct DecayReport {
  LogLogFit fit;
  std::vector<double> radii;
  std::vector<double> integrals;  ///< |B_r| * avg_{B_r} |grad u|^p
};

/// Fits r -> int_{B_r} |grad u|^p. Needs at least three radii, each >= the
/// solution's eps and with B_r inside the box.
DecayReport large_scale_decay(const Solution& s, const Vec& center, const std::vector<double>& radii, double p);

/// r_max, r_max/ratio, ... down to r_min (inclusive when hit within 1e-12).
std::vector<double> geometric_radii(double r_max, double r_min, double ratio = std::sqrt(2.0));

}  // namespace homog
