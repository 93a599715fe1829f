#pragma once

// Uniform periodic discretization of the unit cell and the discrete calculus
// used by every cell-level computation.
//
// Nodes sit at y = (i/n, j/n), i, j = 0..n-1. Modulo Z^d this is the same
// node set as a grid on (-1/2, 1/2]^d. Derivatives are centered second-order
// differences with wrap-around indexing, so `divergence` is exactly the
// negative adjoint of `gradient` under the nodal inner product.
//
// Centered differences on an even periodic grid annihilate, besides constants,
// the 2^d - 1 alternating ("checkerboard") modes (-1)^(s.i), s in {0,1}^d.
// `project_range` removes that whole kernel; `laplacian` and
// `poisson_periodic` work on its orthogonal complement.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "homog/types.hpp"

namespace homog {

class PeriodicGrid {
 public:
  /// Throws PreconditionError unless dim in {1,2}, n >= 8 and n is a power of two.
  PeriodicGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return size_; }

  /// Linear node index with periodic wrap of both indices.
  std::size_t index(int i, int j = 0) const noexcept {
    const int ii = ((i % n_) + n_) % n_;
    const int jj = dim_ == 1 ? 0 : ((j % n_) + n_) % n_;
    return static_cast<std::size_t>(ii) + static_cast<std::size_t>(jj) * static_cast<std::size_t>(n_);
  }
  int axis_index(std::size_t node, int axis) const noexcept {
    return axis == 0 ? static_cast<int>(node % static_cast<std::size_t>(n_))
                     : static_cast<int>(node / static_cast<std::size_t>(n_));
  }
  Vec point(std::size_t node) const noexcept;

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

enum class Rank { scalar, vector, matrix };

/// Scalar, vector or matrix valued nodal field on a PeriodicGrid. Storage is
/// component-major: component c occupies values[c*size, (c+1)*size). Matrix
/// component (r, s) has index r*dim + s.
class CellField {
 public:
  CellField(PeriodicGrid grid, Rank rank, double fill = 0.0);

  static CellField scalar(const PeriodicGrid& grid, double fill = 0.0) {
    return CellField(grid, Rank::scalar, fill);
  }
  static CellField vector(const PeriodicGrid& grid, double fill = 0.0) {
    return CellField(grid, Rank::vector, fill);
  }
  /// Sample a scalar function at the nodes.
  static CellField sample(const PeriodicGrid& grid, const std::function<double(const Vec&)>& fn);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  Rank rank() const noexcept { return rank_; }
  int components() const noexcept { return components_; }
  std::size_t size() const noexcept { return grid_.size(); }

  std::span<double> component(int c) noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()};
  }
  std::span<const double> component(int c) const noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * grid_.size(), grid_.size()};
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double& operator()(int c, std::size_t node) noexcept {
    return values_[static_cast<std::size_t>(c) * grid_.size() + node];
  }
  double operator()(int c, std::size_t node) const noexcept {
    return values_[static_cast<std::size_t>(c) * grid_.size() + node];
  }

  /// Euclidean (vector) or Frobenius (matrix) magnitude at a node.
  double magnitude(std::size_t node) const noexcept;

  CellField& operator+=(const CellField& other);
  CellField& operator-=(const CellField& other);
  CellField& operator*=(double s) noexcept;

  bool all_finite() const noexcept;

 private:
  PeriodicGrid grid_;
  Rank rank_;
  int components_;
  std::vector<double> values_;
};

CellField operator+(CellField a, const CellField& b);
CellField operator-(CellField a, const CellField& b);
CellField operator*(double s, CellField a);

/// Centered periodic difference per axis. Scalar in, vector out.
CellField gradient(const CellField& field);

/// Negative adjoint of `gradient`. Vector in, scalar out.
CellField divergence(const CellField& field);

/// divergence(gradient(u)); the wide 2h-stencil Laplacian.
CellField laplacian(const CellField& field);

/// Per-component nodal average (= integral over the unit cell).
std::vector<double> mean(const CellField& field);

CellField project_zero_mean(const CellField& field);

/// Remove constants and all alternating modes from each component, i.e.
/// project onto the range of `divergence`.
CellField project_range(const CellField& field);

/// L2 norm of the part of `field` removed by `project_range`, minus the mean
/// part. Diagnostic for Poisson right-hand sides.
double alternating_mode_norm(const CellField& field);

/// (sum_nodes |v|^p * spacing^dim)^(1/p), |v| pointwise magnitude.
double lp_norm(const CellField& field, double p);

/// max_nodes |v|.
double sup_norm(const CellField& field);

/// sum_nodes <a, b> * spacing^dim over all components.
double inner(const CellField& a, const CellField& b);

/// Solve laplacian(u) = rhs on the range of the operator, zero-mean output.
/// Throws PreconditionError if |mean(rhs)| > 1e-8 * lp_norm(rhs, 2).
/// Alternating-mode content of rhs (outside the range) is discarded; use
/// `alternating_mode_norm` to measure it.
CellField poisson_periodic(const CellField& rhs);

}  // namespace homog
