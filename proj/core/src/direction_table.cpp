#include "homog/direction_table.hpp"

#include <cmath>
#include <numbers>

#include "homog/parallel.hpp"

namespace homog {

DirectionTable::DirectionTable(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg,
                               int n_dir, int threads)
    : grid_(grid), p_(model.p()), linear_(model.p() == 2.0) {
  if (grid.dim() != model.dim()) throw PreconditionError("grid and model dimensions differ");
  if (grid.dim() == 1) {
    directions_ = {{1.0, 0.0}, {-1.0, 0.0}};
  } else if (linear_) {
    directions_ = {{1.0, 0.0}, {0.0, 1.0}};
  } else {
    if (n_dir < 4) throw PreconditionError("n_dir must be at least 4");
    for (int k = 0; k < n_dir; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n_dir;
      directions_.push_back({std::cos(th), std::sin(th)});
    }
  }

  const std::size_t m = directions_.size();
  std::vector<std::unique_ptr<Corrector>> solved(m);
  parallel_for(m, threads, [&](std::size_t k) {
    solved[k] = std::make_unique<Corrector>(solve_cell(model, directions_[k], grid, cfg));
  });

  for (std::size_t k = 0; k < m; ++k) {
    correctors_.push_back(std::move(*solved[k]));
    const Corrector& c = correctors_.back();
    ahat_.push_back(effective_flux(model, c));
    n_values_.emplace_back(c.N.values().begin(), c.N.values().end());
    const CellField g = gradient(c.N);
    std::array<std::vector<double>, 2> gv;
    for (int a = 0; a < grid.dim(); ++a) gv[a].assign(g.component(a).begin(), g.component(a).end());
    grad_values_.push_back(std::move(gv));
  }
}

double DirectionTable::max_residual() const noexcept {
  double r = 0.0;
  for (const auto& c : correctors_) r = std::max(r, c.residual);
  return r;
}

DirectionTable::Blend DirectionTable::blend(const Vec& xi) const {
  const double r = dim() == 1 ? std::abs(xi[0]) : norm(xi);
  if (r == 0.0) return {0, 0, 0.0, 0.0};
  if (dim() == 1) return xi[0] > 0.0 ? Blend{0, 0, r, 0.0} : Blend{1, 1, r, 0.0};
  if (linear_) return {0, 1, xi[0], xi[1]};
  const double n = static_cast<double>(directions_.size());
  double s = std::atan2(xi[1], xi[0]) / (2.0 * std::numbers::pi) * n;
  s -= n * std::floor(s / n);
  const double f = std::floor(s);
  const auto k0 = static_cast<std::size_t>(f) % directions_.size();
  const double w = s - f;
  return {k0, (k0 + 1) % directions_.size(), r * (1.0 - w), r * w};
}

double DirectionTable::interpolate(const std::vector<double>& values, const Vec& y) const {
  const int n = grid_.n();
  auto split = [n](double t, int& i, double& w) {
    double s = (t - std::floor(t)) * n;
    const double f = std::floor(s);
    i = static_cast<int>(f);
    w = s - f;
  };
  int i, j = 0;
  double wx, wy = 0.0;
  split(y[0], i, wx);
  if (grid_.dim() == 1) return (1.0 - wx) * values[grid_.index(i)] + wx * values[grid_.index(i + 1)];
  split(y[1], j, wy);
  return (1.0 - wx) * (1.0 - wy) * values[grid_.index(i, j)] + wx * (1.0 - wy) * values[grid_.index(i + 1, j)] +
         (1.0 - wx) * wy * values[grid_.index(i, j + 1)] + wx * wy * values[grid_.index(i + 1, j + 1)];
}

double DirectionTable::N(const Vec& y, const Vec& xi) const {
  const Blend b = blend(xi);
  double v = 0.0;
  if (b.w0 != 0.0) v += b.w0 * interpolate(n_values_[b.k0], y);
  if (b.w1 != 0.0) v += b.w1 * interpolate(n_values_[b.k1], y);
  return v;
}

Vec DirectionTable::grad_N(const Vec& y, const Vec& xi) const {
  const Blend b = blend(xi);
  Vec g{0.0, 0.0};
  for (int a = 0; a < dim(); ++a) {
    if (b.w0 != 0.0) g[a] += b.w0 * interpolate(grad_values_[b.k0][a], y);
    if (b.w1 != 0.0) g[a] += b.w1 * interpolate(grad_values_[b.k1][a], y);
  }
  return g;
}

Vec DirectionTable::effective(const Vec& xi) const {
  const Blend b = blend(xi);
  Vec v = b.w0 * ahat_[b.k0] + b.w1 * ahat_[b.k1];
  if (linear_) return v;
  const double r = dim() == 1 ? std::abs(xi[0]) : norm(xi);
  if (r == 0.0) return {0.0, 0.0};
  return std::pow(r, p_ - 2.0) * v;
}

std::unique_ptr<EffectiveOperator> DirectionTable::effective_operator() const {
  if (dim() == 1) {
    const double c = 0.5 * (ahat_[0][0] - ahat_[1][0]);
    if (linear_) return std::make_unique<LinearEffective>(1, Mat{c, 0.0, 0.0, 0.0});
    return std::make_unique<IsotropicEffective>(1, p_, c);
  }
  if (linear_) return std::make_unique<LinearEffective>(2, Mat{ahat_[0][0], ahat_[1][0], ahat_[0][1], ahat_[1][1]});
  return std::make_unique<AngularEffective>(p_, ahat_);
}

}  // namespace homog
