#include "homog/flux_corrector.hpp"

#include <algorithm>
#include <cmath>

namespace homog {

namespace {

CellField component_field(const CellField& v, int c) {
  CellField out = CellField::scalar(v.grid());
  std::copy(v.component(c).begin(), v.component(c).end(), out.values().begin());
  return out;
}

}  // namespace

FluxCorrectorSet::FluxCorrectorSet(Vec xi, CellField b, std::vector<CellField> f)
    : xi_(xi), b_(std::move(b)), f_(std::move(f)) {
  const int d = b_.grid().dim();
  if (b_.rank() != Rank::vector) throw PreconditionError("oscillation must be a vector field");
  if (static_cast<int>(f_.size()) != d) throw PreconditionError("need one potential per dimension");
  std::vector<CellField> grads;
  for (const auto& fi : f_) grads.push_back(gradient(fi));
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i) {
      // E_ji = d_j f_i - d_i f_j
      upper_.push_back(component_field(grads[i], j) - component_field(grads[j], i));
    }
  }
}

CellField FluxCorrectorSet::E(int j, int i) const {
  const int d = grid().dim();
  if (j < 0 || i < 0 || j >= d || i >= d) throw PreconditionError("flux corrector index out of range");
  if (i == j) return CellField::scalar(grid());
  if (j < i) return upper_[0];
  return -1.0 * upper_[0];
}

CellField FluxCorrectorSet::E_matrix() const {
  const int d = grid().dim();
  CellField m(grid(), Rank::matrix);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      const CellField e = E(j, i);
      std::copy(e.values().begin(), e.values().end(), m.component(j * d + i).begin());
    }
  return m;
}

CellField FluxCorrectorSet::column(int i) const {
  const int d = grid().dim();
  CellField v = CellField::vector(grid());
  for (int j = 0; j < d; ++j) {
    const CellField e = E(j, i);
    std::copy(e.values().begin(), e.values().end(), v.component(j).begin());
  }
  return v;
}

CellField oscillation_flux(const FluxModel& model, const Corrector& corrector, const Vec& effective) {
  if (corrector.N.grid().dim() != model.dim()) throw PreconditionError("corrector and model dimensions differ");
  CellField b = corrector_flux(model, corrector);
  for (int c = 0; c < model.dim(); ++c)
    for (double& v : b.component(c)) v -= effective[c];
  return b;
}

FluxCorrectorSet build_flux_corrector(const CellField& b, const Vec& xi) {
  if (b.rank() != Rank::vector) throw PreconditionError("oscillation must be a vector field");
  const CellField centered = project_zero_mean(b);
  std::vector<CellField> f;
  for (int i = 0; i < b.grid().dim(); ++i) f.push_back(poisson_periodic(component_field(centered, i)));
  return FluxCorrectorSet(xi, b, std::move(f));
}

FluxCorrectorSet flux_corrector_at(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid,
                                   const CellSolveConfig& cfg) {
  const Corrector c = solve_cell(model, xi, grid, cfg);
  return build_flux_corrector(oscillation_flux(model, c, effective_flux(model, c)), c.xi);
}

FluxCorrectorReport validate_flux_corrector(const FluxCorrectorSet& set, const CellField& b, double cell_tol,
                                            double poisson_tol) {
  FluxCorrectorReport rep;
  const int d = set.grid().dim();
  const auto m = mean(b);
  for (int i = 0; i < d; ++i) {
    const CellField bi = component_field(b, i);
    const CellField lhs = divergence(set.column(i));
    rep.r1 = std::max(rep.r1, lp_norm(lhs - bi, 2.0));
    rep.mean_b = std::max(rep.mean_b, std::abs(m[i]));
    rep.alternating_b = std::max(rep.alternating_b, alternating_mode_norm(bi));
  }
  CellField fv = CellField::vector(set.grid());
  for (int i = 0; i < d; ++i)
    std::copy(set.f()[i].values().begin(), set.f()[i].values().end(), fv.component(i).begin());
  rep.r2 = lp_norm(divergence(fv), 2.0);
  // E_ij + E_ji over every pair, from the accessor.
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) rep.antisymmetry_defect = std::max(rep.antisymmetry_defect, sup_norm(set.E(j, i) + set.E(i, j)));
  rep.success = rep.r1 <= 100.0 * (cell_tol + poisson_tol);
  return rep;
}

HolderFit holder_E_in_xi(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg,
                         int pair_samples) {
  if (model.dim() != 2) throw PreconditionError("flux corrector Holder fit requires d = 2");
  const Vec base{std::cos(0.3), std::sin(0.3)};
  const CellField e0 = flux_corrector_at(model, base, grid, cfg).E(0, 1);
  HolderFit out;
  for (const auto& [xi2, dist] : holder_pairs(base, 2, pair_samples)) {
    const CellField e1 = flux_corrector_at(model, xi2, grid, cfg).E(0, 1);
    out.distances.push_back(dist);
    out.differences.push_back(lp_norm(e1 - e0, 2.0));
  }
  out.fit = fit_loglog(out.distances, out.differences);
  return out;
}

}  // namespace homog
