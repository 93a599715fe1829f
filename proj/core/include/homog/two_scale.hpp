#pragma once

// First-order two-scale approximation of grad u_eps:
//   V = grad u0 + D^h( eps N(x/eps, phi_eps) ),  phi_eps = S_eps(psi_{4 eps} grad u0),
// with the smoothing operator S_eps, cutoffs psi_r, co-layers Sigma_r and
// difference quotients D^h, plus the error norms and diagnostics built on them.

#include <string>
#include <vector>

#include "homog/direction_table.hpp"
#include "homog/domain_solver.hpp"

namespace homog {

using NodeMask = std::vector<char>;

/// Normalized discrete bump exp(-1/(1 - (2|z|/eps)^2)) on mesh offsets with |z| < eps/2.
struct MollifierKernel {
  int radius = 0;  ///< in nodes
  std::vector<std::array<int, 2>> offsets;
  std::vector<double> weights;  ///< sum to one
};

/// Throws PreconditionError unless eps is a multiple of 4 mesh spacings.
MollifierKernel mollifier_kernel(const DomainMesh& mesh, double eps);

/// Discrete convolution with the kernel; values outside the box count as zero.
NodalField mollify(const NodalField& field, double eps);

/// Cubic smoothstep cutoff: 1 on Sigma_{2r}, 0 off Sigma_r. Requires 0 < r <= 1/2.
NodalField cutoff(const DomainMesh& mesh, double r);

/// Sigma_r = {x : dist(x, boundary) > r}.
NodeMask colayer_mask(const DomainMesh& mesh, double r);

struct DiffQuotient {
  NodalField values;
  NodeMask mask;  ///< nodes with x + h e_axis inside the closed box
};

/// (f(x + h e_axis) - f(x)) / h for every component. h must be a positive
/// multiple of the mesh spacing.
DiffQuotient diff_quotient(const NodalField& field, int axis, double h);

/// eps^tau rounded up to a positive multiple of the spacing.
double grid_step(const DomainMesh& mesh, double eps, double tau);

struct TauInterval {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double lower = 1.0;
  double upper = 0.0;  ///< +inf when unbounded (p = 2)
  double default_tau = 1.0;
  /// For p < 2 the second range used by the p <= 2 estimate.
  double lower_alt = 0.0;
  double upper_alt = 0.0;
  std::string branch;
  bool contains(double tau) const { return tau > lower && tau < upper; }
};

/// alpha, gamma, beta = delta/(p(1+delta)) and the admissible (lower, upper) for
/// h = eps^tau. Throws PreconditionError for p <= 1, delta or theta outside
/// (0,1), or an empty interval.
TauInterval admissible_tau(double p, double delta, double theta);

struct ApproxField {
  NodalField V;
  NodalField grad_u0;
  NodalField corrector_term;  ///< D^h(eps N(x/eps, phi))
  NodalField phi;
  double eps = 0.0;
  double tau = 0.0;
  double h = 0.0;
  std::vector<std::string> warnings;
};

struct TwoScaleOptions {
  double delta = 0.1;
  double theta = 0.5;
};

/// Builds V for the homogenized solution u0. N(y, xi) comes from the table;
/// values outside the box are taken as zero (phi vanishes near the boundary).
/// Warnings are recorded when tau is outside the admissible interval or h had
/// to be reduced below eps.
ApproxField build_first_order_gradient(const DirectionTable& table, const Solution& u0, double eps, double tau,
                                       const TwoScaleOptions& opt = {});

/// L^p norm of grad u_eps - V over interior nodes of Sigma_r, r = eval_depth
/// (default: V.eps). A sweep passes its largest eps so every row is measured
/// on the same set.
double error_gradient_norm(const Solution& u_eps, const ApproxField& V, double p, double eval_depth = 0.0);
/// L^p norm of u_eps - u0 over the box.
double error_solution_norm(const Solution& u_eps, const Solution& u0, double p);

struct OmegaReport {
  double fraction = 0.0;
  double M = 0.0;
  double holder = 0.0;
  double sup = 0.0;
  NodeMask mask;
};

/// Omega_{M,eps} = {|grad u0| <= M eps^vartheta} with M the discrete
/// vartheta-Holder seminorm of grad u0 (node pairs closer than 1/4, subsampled
/// to at most ~65 nodes per axis in 2D) plus its sup.
OmegaReport omega_M_eps(const Solution& u0, double eps, double vartheta = 0.5);

struct SmoothingReport {
  double left = 0.0;
  double right = 0.0;  ///< eps^p * integral |grad phi|^p |grad u0|^r
  double ratio = 0.0;
  double complement_fraction = 0.0;
};

/// Weighted smoothing inequality on the complement of Omega_{M,eps},
/// phi = psi_{4 eps} grad u0. Throws PreconditionError when the complement is empty.
SmoothingReport weighted_smoothing_check(const Solution& u0, double eps, double p, double r,
                                         double vartheta = 0.5);

struct DecompositionReport {
  double remainder = 0.0;     ///< ||D^h(eps N) - first term||_2 over the axis mask
  double normalized = 0.0;    ///< remainder / ||eps h^(alpha-1) |D^h phi|^alpha||_2 (0 when both vanish)
  double first_term = 0.0;    ///< ||first term||_2
  double quadrature_defect = 0.0;  ///< trapezoid rule of grad N vs the exact frozen difference
  double h = 0.0;
};

/// Splits D_i^h(eps N(x/eps, phi)) into the frozen-argument part
/// (eps/h)[N(y + (h/eps) e_i, phi(x+h e_i)) - N(y, phi(x+h e_i))] and the
/// remainder carried by the change of phi. Reported for axis 0.
DecompositionReport phi_decomposition_check(const DirectionTable& table, const NodalField& phi, double eps,
                                            double tau, int quadrature_samples = 16);

}  // namespace homog
