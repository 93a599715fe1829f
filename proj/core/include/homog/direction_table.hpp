#pragma once

// Correctors for a finite set of unit directions, extended to all xi by
// homogeneity: N(y, xi) = |xi| N(y, xi/|xi|).
//
//   d = 1:          directions {+1, -1}
//   d = 2, p = 2:   basis e1, e2 (the cell problem is linear)
//   d = 2, p != 2:  n_dir equally spaced angles, periodic linear interpolation

#include <memory>
#include <vector>

#include "homog/cell_solver.hpp"
#include "homog/effective_operator.hpp"

namespace homog {

class DirectionTable {
 public:
  DirectionTable(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg = {},
                 int n_dir = 64, int threads = 1);

  int dim() const noexcept { return grid_.dim(); }
  double p() const noexcept { return p_; }
  bool linear() const noexcept { return linear_; }
  const PeriodicGrid& grid() const noexcept { return grid_; }
  const std::vector<Corrector>& correctors() const noexcept { return correctors_; }
  const std::vector<Vec>& effective_samples() const noexcept { return ahat_; }
  double max_residual() const noexcept;

  /// N(y, xi) with bilinear periodic interpolation in y.
  double N(const Vec& y, const Vec& xi) const;
  /// grad_y N(y, xi), from centered differences of the tabulated correctors.
  Vec grad_N(const Vec& y, const Vec& xi) const;

  /// Ahat(xi) from the table.
  Vec effective(const Vec& xi) const;
  std::unique_ptr<EffectiveOperator> effective_operator() const;

 private:
  struct Blend {
    std::size_t k0, k1;
    double w0, w1;
  };
  Blend blend(const Vec& xi) const;
  double interpolate(const std::vector<double>& values, const Vec& y) const;

  PeriodicGrid grid_;
  double p_;
  bool linear_;
  std::vector<Vec> directions_;
  std::vector<Corrector> correctors_;
  std::vector<Vec> ahat_;
  std::vector<std::vector<double>> n_values_;
  std::vector<std::array<std::vector<double>, 2>> grad_values_;
};

}  // namespace homog
