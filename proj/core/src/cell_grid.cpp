#include "homog/cell_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectral.hpp"

namespace homog {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int component_count(int dim, Rank rank) {
  switch (rank) {
    case Rank::scalar:
      return 1;
    case Rank::vector:
      return dim;
    case Rank::matrix:
      return dim * dim;
  }
  return 1;
}

void require_rank(const CellField& f, Rank rank, const char* op) {
  if (f.rank() != rank) {
    throw PreconditionError(std::string(op) + ": field has the wrong rank");
  }
}

void require_same_shape(const CellField& a, const CellField& b) {
  if (!(a.grid() == b.grid()) || a.rank() != b.rank()) {
    throw PreconditionError("CellField: grid or rank mismatch");
  }
}

double cell_volume(const PeriodicGrid& g) { return std::pow(g.spacing(), g.dim()); }

}  // namespace

PeriodicGrid::PeriodicGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw PreconditionError("PeriodicGrid: dim must be 1 or 2");
  if (n < 8 || !is_power_of_two(n)) {
    throw PreconditionError("PeriodicGrid: n must be a power of two and >= 8, got " +
                            std::to_string(n));
  }
  size_ = dim == 1 ? static_cast<std::size_t>(n)
                   : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
}

Vec PeriodicGrid::point(std::size_t node) const noexcept {
  Vec y{static_cast<double>(axis_index(node, 0)) / n_, 0.0};
  if (dim_ == 2) y[1] = static_cast<double>(axis_index(node, 1)) / n_;
  return y;
}

CellField::CellField(PeriodicGrid grid, Rank rank, double fill)
    : grid_(grid),
      rank_(rank),
      components_(component_count(grid.dim(), rank)),
      values_(static_cast<std::size_t>(components_) * grid.size(), fill) {}

CellField CellField::sample(const PeriodicGrid& grid, const std::function<double(const Vec&)>& fn) {
  CellField f = scalar(grid);
  for (std::size_t node = 0; node < grid.size(); ++node) f(0, node) = fn(grid.point(node));
  return f;
}

double CellField::magnitude(std::size_t node) const noexcept {
  if (components_ == 1) return std::abs((*this)(0, node));
  double s = 0.0;
  for (int c = 0; c < components_; ++c) {
    const double v = (*this)(c, node);
    s += v * v;
  }
  return std::sqrt(s);
}

CellField& CellField::operator+=(const CellField& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

CellField& CellField::operator-=(const CellField& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

CellField& CellField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

bool CellField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

CellField operator+(CellField a, const CellField& b) { return a += b; }
CellField operator-(CellField a, const CellField& b) { return a -= b; }
CellField operator*(double s, CellField a) { return a *= s; }

CellField gradient(const CellField& field) {
  require_rank(field, Rank::scalar, "gradient");
  const PeriodicGrid& g = field.grid();
  const int n = g.n();
  const double inv = 0.5 / g.spacing();
  CellField out = CellField::vector(g);
  auto u = field.component(0);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      out(0, g.index(i)) = (u[g.index(i + 1)] - u[g.index(i - 1)]) * inv;
    }
    return out;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t node = g.index(i, j);
      out(0, node) = (u[g.index(i + 1, j)] - u[g.index(i - 1, j)]) * inv;
      out(1, node) = (u[g.index(i, j + 1)] - u[g.index(i, j - 1)]) * inv;
    }
  }
  return out;
}

CellField divergence(const CellField& field) {
  require_rank(field, Rank::vector, "divergence");
  const PeriodicGrid& g = field.grid();
  const int n = g.n();
  const double inv = 0.5 / g.spacing();
  CellField out = CellField::scalar(g);
  auto f1 = field.component(0);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      out(0, g.index(i)) = (f1[g.index(i + 1)] - f1[g.index(i - 1)]) * inv;
    }
    return out;
  }
  auto f2 = field.component(1);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out(0, g.index(i, j)) = (f1[g.index(i + 1, j)] - f1[g.index(i - 1, j)]) * inv +
                              (f2[g.index(i, j + 1)] - f2[g.index(i, j - 1)]) * inv;
    }
  }
  return out;
}

CellField laplacian(const CellField& field) { return divergence(gradient(field)); }

std::vector<double> mean(const CellField& field) {
  std::vector<double> out(static_cast<std::size_t>(field.components()), 0.0);
  const double inv = 1.0 / static_cast<double>(field.size());
  for (int c = 0; c < field.components(); ++c) {
    double s = 0.0;
    for (double v : field.component(c)) s += v;
    out[static_cast<std::size_t>(c)] = s * inv;
  }
  return out;
}

CellField project_zero_mean(const CellField& field) {
  CellField out = field;
  const auto m = mean(field);
  for (int c = 0; c < out.components(); ++c) {
    for (double& v : out.component(c)) v -= m[static_cast<std::size_t>(c)];
  }
  return out;
}

namespace {

// Signs (-1)^(s1*i + s2*j) of the kernel modes at a node.
double mode_sign(const PeriodicGrid& g, std::size_t node, int s1, int s2) {
  const int i = g.axis_index(node, 0);
  const int j = g.dim() == 2 ? g.axis_index(node, 1) : 0;
  return ((s1 * i + s2 * j) % 2 == 0) ? 1.0 : -1.0;
}

// Remove every kernel mode except (optionally) the constant from one component.
void remove_modes(const PeriodicGrid& g, std::span<double> v, bool include_constant) {
  const int s2_max = g.dim() == 2 ? 1 : 0;
  const double inv = 1.0 / static_cast<double>(g.size());
  for (int s2 = 0; s2 <= s2_max; ++s2) {
    for (int s1 = 0; s1 <= 1; ++s1) {
      if (s1 == 0 && s2 == 0 && !include_constant) continue;
      double coeff = 0.0;
      for (std::size_t node = 0; node < g.size(); ++node) coeff += v[node] * mode_sign(g, node, s1, s2);
      coeff *= inv;
      for (std::size_t node = 0; node < g.size(); ++node) v[node] -= coeff * mode_sign(g, node, s1, s2);
    }
  }
}

}  // namespace

CellField project_range(const CellField& field) {
  CellField out = field;
  for (int c = 0; c < out.components(); ++c) remove_modes(out.grid(), out.component(c), true);
  return out;
}

double alternating_mode_norm(const CellField& field) {
  CellField zero_mean = project_zero_mean(field);
  CellField removed = zero_mean - project_range(zero_mean);
  return lp_norm(removed, 2.0);
}

double lp_norm(const CellField& field, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("lp_norm: p must be finite and >= 1");
  double s = 0.0;
  for (std::size_t node = 0; node < field.size(); ++node) s += std::pow(field.magnitude(node), p);
  return std::pow(s * cell_volume(field.grid()), 1.0 / p);
}

double sup_norm(const CellField& field) {
  double m = 0.0;
  for (std::size_t node = 0; node < field.size(); ++node) m = std::max(m, field.magnitude(node));
  return m;
}

double inner(const CellField& a, const CellField& b) {
  require_same_shape(a, b);
  double s = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  return s * cell_volume(a.grid());
}

CellField poisson_periodic(const CellField& rhs) {
  require_rank(rhs, Rank::scalar, "poisson_periodic");
  const double m = mean(rhs)[0];
  const double scale = lp_norm(rhs, 2.0);
  if (std::abs(m) > 1e-8 * scale) {
    throw PreconditionError("poisson_periodic: right-hand side has nonzero mean " + std::to_string(m));
  }
  CellField out = CellField::scalar(rhs.grid());
  detail::SpectralSolver solver(rhs.grid());
  // laplacian(u) = rhs  <=>  (-laplacian) u = -rhs
  CellField neg = -1.0 * rhs;
  solver.apply_inverse_neg_laplacian(neg.component(0), out.component(0));
  return out;
}

}  // namespace homog
