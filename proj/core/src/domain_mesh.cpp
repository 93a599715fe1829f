#include "homog/domain_mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

namespace homog {

DomainMesh::DomainMesh(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw PreconditionError("mesh dimension must be 1 or 2");
  if (n < 2) throw PreconditionError("mesh needs at least two intervals per axis");
  const auto m = static_cast<std::size_t>(n + 1);
  size_ = dim == 1 ? m : m * m;
  const double h = spacing();

  if (dim == 1) {
    elements_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Element e;
      e.nodes = {index(i), index(i + 1), 0};
      e.grads = {Vec{-1.0 / h, 0.0}, Vec{1.0 / h, 0.0}, Vec{}};
      e.measure = h;
      e.centroid = {(i + 0.5) * h, 0.0};
      elements_.push_back(e);
    }
    return;
  }

  elements_.reserve(2 * static_cast<std::size_t>(n) * n);
  const double area = 0.5 * h * h;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Element lower;
      lower.nodes = {index(i, j), index(i + 1, j), index(i + 1, j + 1)};
      lower.grads = {Vec{-1.0 / h, 0.0}, Vec{1.0 / h, -1.0 / h}, Vec{0.0, 1.0 / h}};
      lower.measure = area;
      lower.centroid = {(i + 2.0 / 3.0) * h, (j + 1.0 / 3.0) * h};
      elements_.push_back(lower);

      Element upper;
      upper.nodes = {index(i, j), index(i + 1, j + 1), index(i, j + 1)};
      upper.grads = {Vec{0.0, -1.0 / h}, Vec{1.0 / h, 0.0}, Vec{-1.0 / h, 1.0 / h}};
      upper.measure = area;
      upper.centroid = {(i + 1.0 / 3.0) * h, (j + 2.0 / 3.0) * h};
      elements_.push_back(upper);
    }
  }
}

Vec DomainMesh::point(std::size_t node) const noexcept {
  const double h = spacing();
  return {axis_index(node, 0) * h, dim_ == 2 ? axis_index(node, 1) * h : 0.0};
}

bool DomainMesh::is_boundary(std::size_t node) const noexcept {
  for (int a = 0; a < dim_; ++a) {
    const int k = axis_index(node, a);
    if (k == 0 || k == n_) return true;
  }
  return false;
}

double DomainMesh::boundary_distance(std::size_t node) const noexcept {
  double d = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const int k = axis_index(node, a);
    d = std::min(d, std::min(k, n_ - k) * spacing());
  }
  return d;
}

bool DomainMesh::compatible(double eps) const noexcept {
  const double cells = eps * n_;
  return eps > 0.0 && cells >= 1.0 - 1e-9 && std::abs(cells - std::round(cells)) <= 1e-9 * std::max(1.0, cells);
}

NodalField::NodalField(const DomainMesh& mesh, int components, double fill)
    : mesh_(mesh), components_(components), values_(static_cast<std::size_t>(components) * mesh.size(), fill) {
  if (components < 1 || components > 2) throw PreconditionError("nodal fields have 1 or 2 components");
}

NodalField NodalField::sample(const DomainMesh& mesh, const std::function<double(const Vec&)>& fn) {
  NodalField f(mesh, 1);
  for (std::size_t k = 0; k < mesh.size(); ++k) f.values_[k] = fn(mesh.point(k));
  return f;
}

NodalField& NodalField::operator+=(const NodalField& o) {
  if (!(mesh_ == o.mesh_) || components_ != o.components_) throw PreconditionError("nodal field shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

NodalField& NodalField::operator-=(const NodalField& o) {
  if (!(mesh_ == o.mesh_) || components_ != o.components_) throw PreconditionError("nodal field shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

NodalField& NodalField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

NodalField operator+(NodalField a, const NodalField& b) { return a += b; }
NodalField operator-(NodalField a, const NodalField& b) { return a -= b; }
NodalField operator*(double s, NodalField a) { return a *= s; }

NodalField nodal_gradient(const NodalField& u) {
  const DomainMesh& mesh = u.mesh();
  const int n = mesh.n();
  const double h = mesh.spacing();
  NodalField g(mesh, mesh.dim());
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    for (int a = 0; a < mesh.dim(); ++a) {
      const int i = mesh.axis_index(k, a);
      const int other = mesh.dim() == 2 ? mesh.axis_index(k, 1 - a) : 0;
      auto at = [&](int ii) {
        return a == 0 ? u(0, mesh.index(ii, other)) : u(0, mesh.index(other, ii));
      };
      double d;
      if (i == 0) {
        d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      } else if (i == n) {
        d = (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) / (2.0 * h);
      } else {
        d = (at(i + 1) - at(i - 1)) / (2.0 * h);
      }
      g(a, k) = d;
    }
  }
  return g;
}

double lp_norm(const NodalField& f, double p, const std::vector<char>& mask) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("lp_norm needs finite p >= 1");
  if (!mask.empty() && mask.size() != f.size()) throw PreconditionError("mask size mismatch");
  const double vol = std::pow(f.mesh().spacing(), f.mesh().dim());
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    double m2 = 0.0;
    for (int c = 0; c < f.components(); ++c) m2 += f(c, k) * f(c, k);
    s += std::pow(std::sqrt(m2), p);
  }
  return std::pow(s * vol, 1.0 / p);
}

double Preset::operator()(const Vec& x, int dim) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::affine:
      return offset + slope[0] * x[0] + (dim == 2 ? slope[1] * x[1] : 0.0);
    case Kind::sine_product: {
      double v = amplitude * std::sin(std::numbers::pi * frequency[0] * x[0] + phase[0]);
      if (dim == 2) v *= std::sin(std::numbers::pi * frequency[1] * x[1] + phase[1]);
      return v;
    }
  }
  return 0.0;
}

std::function<double(const Vec&)> Preset::function(int dim) const {
  return [p = *this, dim](const Vec& x) { return p(x, dim); };
}

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_csv(const NodalField& f, const std::filesystem::path& path, int component) {
  auto out = open_out(path, std::ios::out | std::ios::trunc);
  out << "index1,index2,value\n";
  const DomainMesh& m = f.mesh();
  char buf[64];
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto r = std::to_chars(buf, buf + sizeof buf, f(component, k));
    out << m.axis_index(k, 0) << ',' << (m.dim() == 2 ? m.axis_index(k, 1) : 0) << ','
        << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)) << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

void write_binary(const NodalField& f, const std::filesystem::path& path, int component) {
  auto out = open_out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  const auto c = f.component(component);
  out.write(reinterpret_cast<const char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(double)));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace homog
