#pragma once

// FFT-diagonalized operators on a PeriodicGrid. Internal to the library.

#include <complex>
#include <span>
#include <vector>

#include "homog/cell_grid.hpp"

namespace homog::detail {

/// Owns FFTW plans and buffers for one grid. Not thread-safe per instance;
/// distinct instances may be used concurrently.
class SpectralSolver {
 public:
  explicit SpectralSolver(const PeriodicGrid& grid);
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  /// out = (scale * (-laplacian))^+ in, i.e. the pseudo-inverse of the
  /// positive semidefinite wide Laplacian. Kernel modes of the output are zero.
  void apply_inverse_neg_laplacian(std::span<const double> in, std::span<double> out,
                                   double scale = 1.0);

  /// Symbol of -laplacian at wave numbers (k1, k2); zero on the kernel.
  double symbol(int k1, int k2) const;

 private:
  PeriodicGrid grid_;
  std::vector<double> symbols_;
  void* buffer_ = nullptr;  // fftw_complex*
  void* forward_ = nullptr;  // fftw_plan
  void* backward_ = nullptr;
};

}  // namespace homog::detail
