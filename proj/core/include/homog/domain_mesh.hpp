#pragma once

// Uniform node grid on the unit box (0,1)^d with a P1 element structure
// (intervals in 1D, the right-diagonal triangulation in 2D), nodal fields
// and the analytic data presets used for boundary values and sources.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "homog/types.hpp"

namespace homog {

struct Element {
  std::array<std::size_t, 3> nodes{};  ///< first dim+1 entries used
  std::array<Vec, 3> grads{};          ///< gradients of the nodal basis functions
  double measure = 0.0;
  Vec centroid{0.0, 0.0};
};

class DomainMesh {
 public:
  /// n intervals per axis, n+1 nodes per axis. Throws unless dim in {1,2}, n >= 2.
  DomainMesh(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  int nodes_per_axis() const noexcept { return n_ + 1; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index(int i, int j = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(n_ + 1);
  }
  int axis_index(std::size_t node, int axis) const noexcept {
    const auto m = static_cast<std::size_t>(n_ + 1);
    return axis == 0 ? static_cast<int>(node % m) : static_cast<int>(node / m);
  }
  Vec point(std::size_t node) const noexcept;
  bool is_boundary(std::size_t node) const noexcept;
  /// Distance to the boundary of the box.
  double boundary_distance(std::size_t node) const noexcept;

  /// eps * n is a positive integer.
  bool compatible(double eps) const noexcept;

  const std::vector<Element>& elements() const noexcept { return elements_; }

  bool operator==(const DomainMesh& o) const noexcept { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  int dim_;
  int n_;
  std::size_t size_;
  std::vector<Element> elements_;
};

/// Scalar or vector nodal field on a DomainMesh; component-major storage.
class NodalField {
 public:
  NodalField(const DomainMesh& mesh, int components, double fill = 0.0);

  static NodalField sample(const DomainMesh& mesh, const std::function<double(const Vec&)>& fn);

  const DomainMesh& mesh() const noexcept { return mesh_; }
  int components() const noexcept { return components_; }
  std::size_t size() const noexcept { return mesh_.size(); }

  double& operator()(int c, std::size_t node) noexcept { return values_[static_cast<std::size_t>(c) * size() + node]; }
  double operator()(int c, std::size_t node) const noexcept {
    return values_[static_cast<std::size_t>(c) * size() + node];
  }
  Vec vec(std::size_t node) const noexcept {
    return {values_[node], components_ > 1 ? values_[size() + node] : 0.0};
  }
  std::span<double> component(int c) noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * size(), size()};
  }
  std::span<const double> component(int c) const noexcept {
    return {values_.data() + static_cast<std::size_t>(c) * size(), size()};
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  NodalField& operator+=(const NodalField& o);
  NodalField& operator-=(const NodalField& o);
  NodalField& operator*=(double s) noexcept;

 private:
  DomainMesh mesh_;
  int components_;
  std::vector<double> values_;
};

NodalField operator+(NodalField a, const NodalField& b);
NodalField operator-(NodalField a, const NodalField& b);
NodalField operator*(double s, NodalField a);

/// Centered differences at interior nodes, one-sided second order at the boundary.
NodalField nodal_gradient(const NodalField& u);

/// (sum over masked nodes |v|^p h^d)^(1/p); empty mask means all nodes.
double lp_norm(const NodalField& f, double p, const std::vector<char>& mask = {});

/// Named analytic data used for boundary values and sources.
struct Preset {
  enum class Kind { zero, affine, sine_product };
  Kind kind = Kind::zero;
  double offset = 0.0;          ///< affine: c0
  Vec slope{0.0, 0.0};          ///< affine: c0 + slope.x
  double amplitude = 1.0;       ///< sine_product: amplitude * prod sin(pi k_j x_j + phase_j)
  Vec frequency{1.0, 1.0};
  Vec phase{0.0, 0.0};

  static Preset zero() { return {}; }
  static Preset constant(double c) { return affine(c, {0.0, 0.0}); }
  static Preset affine(double c0, Vec slope) {
    Preset p;
    p.kind = Kind::affine;
    p.offset = c0;
    p.slope = slope;
    return p;
  }
  static Preset sine_product(double amplitude, Vec frequency, Vec phase = {0.0, 0.0}) {
    Preset p;
    p.kind = Kind::sine_product;
    p.amplitude = amplitude;
    p.frequency = frequency;
    p.phase = phase;
    return p;
  }

  double operator()(const Vec& x, int dim) const;
  std::function<double(const Vec&)> function(int dim) const;
};

/// Rows "index1,index2,value" in node order (index1 fastest); index2 = 0 in 1D.
void write_csv(const NodalField& f, const std::filesystem::path& path, int component = 0);
/// Raw little-endian float64 values in the same order.
void write_binary(const NodalField& f, const std::filesystem::path& path, int component = 0);

}  // namespace homog
