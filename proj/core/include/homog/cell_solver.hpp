#pragma once

// Corrector cell problem: find zero-mean periodic N with
//   div A_mu(y, xi + grad N) = 0
// on the unit cell, and the effective flux as the cell average of A(y, P).

#include <vector>

#include "homog/cell_grid.hpp"
#include "homog/flux_model.hpp"
#include "homog/rate_fit.hpp"

namespace homog {

enum class Strategy { newton, picard };

struct CellSolveConfig {
  double tol = 1e-9;
  int max_iter = 200;
  /// Empty: the default schedule for the model's p (see default_mu_schedule).
  std::vector<double> mu_schedule;
  double damping = 0.5;
  Strategy strategy = Strategy::newton;
  /// Residual target of the intermediate continuation stages.
  double stage_tol = 1e-6;
  int max_linear_iter = 2000;
};

/// {1e-2, 1e-4, 1e-6, 1e-8} followed by 0 when p >= 2; {0} for p == 2.
std::vector<double> default_mu_schedule(double p);

struct Corrector {
  Vec xi{0.0, 0.0};
  CellField N;
  CellField P;
  double residual = 0.0;
  double energy = 0.0;  ///< NaN for matrix weights
  int iterations = 0;
  double mu = 0.0;  ///< regularization of the final stage
};

/// Throws PreconditionError on dimension mismatch or a malformed schedule,
/// SolverError (carrying the best N) when a stage does not converge.
/// The residual contract is tol * max(1, weight upper bound * |xi|^(p-1)), so
/// the tolerance is relative once fluxes exceed unit size.
Corrector solve_cell(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid,
                     const CellSolveConfig& cfg = {});

/// A_mu(y, P) on the grid at the corrector's final mu.
CellField corrector_flux(const FluxModel& model, const Corrector& corrector);

/// Discrete residual field div A_mu(y, P).
CellField cell_residual(const FluxModel& model, const Corrector& corrector);

/// Cell average of A_mu(y, P) at the corrector's final mu.
Vec effective_flux(const FluxModel& model, const Corrector& corrector);
Vec effective_flux(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid,
                   const CellSolveConfig& cfg = {});

/// (int_0^1 a(y)^(1/(1-p)) dy)^(1-p) by composite 8-point Gauss-Legendre
/// quadrature over `quad_points` nodes. Requires d = 1 and a scalar weight.
double effective_flux_1d_oracle(const FluxModel& model, int quad_points = 10000);

struct CorrectorBounds {
  double n_lp = 0.0;        ///< ||N||_p / |xi|
  double grad_lp = 0.0;     ///< ||grad N||_p / |xi|
  double grad_sup = 0.0;    ///< ||grad N||_inf / |xi|
  bool finite = true;
};

CorrectorBounds corrector_bounds_check(const Corrector& corrector, double p);

struct HolderFit {
  LogLogFit fit;
  std::vector<double> distances;
  std::vector<double> differences;
};

/// Log-log fit of ||P(., xi) - P(., xi')||_p against |xi - xi'| for unit
/// vectors. In 2D xi' is xi rotated so that |xi - xi'| runs log-uniformly over
/// [1e-4, 1e-1]; in 1D xi' = (1 + t) xi.
HolderFit holder_in_xi(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg,
                       int pair_samples = 4);

/// Largest relative superposition defect over N(e1+e2) vs N(e1)+N(e2) and
/// N(2 e1) vs 2 N(e1). Throws PreconditionError unless p == 2.
double linearity_check_p2(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg = {});

/// Unit vectors at log-uniform chord distances in [1e-4, 1e-1] from `base`.
/// Shared by the Holder fits of correctors and flux correctors.
std::vector<std::pair<Vec, double>> holder_pairs(const Vec& base, int dim, int samples);

}  // namespace homog
