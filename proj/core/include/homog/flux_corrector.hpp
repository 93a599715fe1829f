#pragma once

// Oscillation b(y, xi) = A(y, P) - Ahat(xi) and the antisymmetric flux
// corrector E_ji = d_j f_i - d_i f_j with laplacian(f_i) = b_i.

#include <vector>

#include "homog/cell_grid.hpp"
#include "homog/cell_solver.hpp"

namespace homog {

class FluxCorrectorSet {
 public:
  FluxCorrectorSet(Vec xi, CellField b, std::vector<CellField> f);

  const Vec& xi() const noexcept { return xi_; }
  const CellField& b() const noexcept { return b_; }
  const std::vector<CellField>& f() const noexcept { return f_; }
  const PeriodicGrid& grid() const noexcept { return b_.grid(); }

  /// E_ji. Only E_01 is stored (d = 2); the diagonal is identically zero and
  /// E_10 = -E_01 is produced on access.
  CellField E(int j, int i) const;

  /// Full d x d matrix field with entry (j, i) = E_ji.
  CellField E_matrix() const;

  /// Field whose component j is E_ji, so divergence() gives sum_j d_j E_ji.
  CellField column(int i) const;

 private:
  Vec xi_;
  CellField b_;
  std::vector<CellField> f_;
  std::vector<CellField> upper_;  // E_ji for j < i, row-major over pairs
};

/// A_mu(y, P(y, xi)) - effective. Throws PreconditionError on dimension mismatch.
CellField oscillation_flux(const FluxModel& model, const Corrector& corrector, const Vec& effective);

/// Removes the (round-off sized) mean of b, solves laplacian(f_i) = b_i and
/// differentiates. Alternating-mode content of b is outside the range of the
/// operators and is dropped with the mean.
FluxCorrectorSet build_flux_corrector(const CellField& b, const Vec& xi = {0.0, 0.0});

/// Solve the cell problem at xi and build the flux corrector of its oscillation.
FluxCorrectorSet flux_corrector_at(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid,
                                   const CellSolveConfig& cfg = {});

struct FluxCorrectorReport {
  double r1 = 0.0;  ///< max_i ||sum_j d_j E_ji - b_i||_2
  double r2 = 0.0;  ///< ||div f||_2
  double antisymmetry_defect = 0.0;
  double mean_b = 0.0;  ///< max_i |mean(b_i)|
  double alternating_b = 0.0;  ///< max_i alternating-mode norm of b_i
  bool success = false;
};

/// success iff r1 <= 100 (cell_tol + poisson_tol).
FluxCorrectorReport validate_flux_corrector(const FluxCorrectorSet& set, const CellField& b,
                                            double cell_tol = 1e-9, double poisson_tol = 1e-10);

/// Log-log fit of ||E(., xi) - E(., xi')||_2 against |xi - xi'| for unit
/// vectors, pairs as in holder_in_xi. Requires d = 2 (E vanishes in 1D).
HolderFit holder_E_in_xi(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg,
                         int pair_samples = 4);

}  // namespace homog
