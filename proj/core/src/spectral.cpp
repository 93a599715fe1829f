#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace homog::detail {

namespace {

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralSolver::SpectralSolver(const PeriodicGrid& grid) : grid_(grid) {
  const int n = grid.n();
  const double h = grid.spacing();
  const std::size_t total = grid.size();
  symbols_.resize(total);
  for (std::size_t node = 0; node < total; ++node) {
    const int k1 = grid.axis_index(node, 0);
    const int k2 = grid.dim() == 2 ? grid.axis_index(node, 1) : 0;
    const bool k1_null = (k1 == 0) || (2 * k1 == n);
    const bool k2_null = (k2 == 0) || (2 * k2 == n);
    if (k1_null && k2_null) {
      symbols_[node] = 0.0;
      continue;
    }
    const double s1 = std::sin(2.0 * std::numbers::pi * k1 / n);
    double sym = s1 * s1;
    if (grid.dim() == 2) {
      const double s2 = std::sin(2.0 * std::numbers::pi * k2 / n);
      sym += s2 * s2;
    }
    symbols_[node] = sym / (h * h);
  }

  std::lock_guard lock(planner_mutex());
  auto* buf = fftw_alloc_complex(total);
  buffer_ = buf;
  if (grid.dim() == 1) {
    forward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    // FFTW is row-major: the slow index (j) comes first.
    forward_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
}

SpectralSolver::~SpectralSolver() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  fftw_free(static_cast<fftw_complex*>(buffer_));
}

double SpectralSolver::symbol(int k1, int k2) const {
  return symbols_[grid_.index(k1, k2)];
}

void SpectralSolver::apply_inverse_neg_laplacian(std::span<const double> in, std::span<double> out,
                                                 double scale) {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  const std::size_t total = grid_.size();
  for (std::size_t i = 0; i < total; ++i) {
    buf[i][0] = in[i];
    buf[i][1] = 0.0;
  }
  fftw_execute(static_cast<fftw_plan>(forward_));
  const double norm = 1.0 / (static_cast<double>(total) * scale);
  for (std::size_t i = 0; i < total; ++i) {
    const double s = symbols_[i];
    if (s == 0.0) {
      buf[i][0] = 0.0;
      buf[i][1] = 0.0;
    } else {
      buf[i][0] *= norm / s;
      buf[i][1] *= norm / s;
    }
  }
  fftw_execute(static_cast<fftw_plan>(backward_));
  for (std::size_t i = 0; i < total; ++i) out[i] = buf[i][0];
}

}  // namespace homog::detail
