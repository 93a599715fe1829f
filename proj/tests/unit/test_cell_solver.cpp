#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homog/cell_solver.hpp"

namespace {

using namespace homog;
constexpr double kPi = std::numbers::pi;

Weight trig1d() { return Weight(TrigWeight{2.0, {{1.0, {1, 0}, 0.0}}}, 1); }
Weight layered2d() { return Weight(LayeredWeight{Profile{2.0, {{1.0, 1, 0.0}}}}, 2); }

// (int_0^1 (2 + sin 2 pi y)^(1/(1-p)) dy)^(1-p) by composite Simpson on a fine grid.
double harmonic_oracle(double p) {
  const int n = 200000;
  const double h = 1.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(2.0 + std::sin(2 * kPi * i * h), 1.0 / (1.0 - p));
  }
  return std::pow(s * h / 3.0, 1.0 - p);
}

TEST(DefaultSchedule, ContinuationOnlyAwayFromTwo) {
  EXPECT_EQ(default_mu_schedule(2.0), std::vector<double>{0.0});
  const auto s = default_mu_schedule(3.0);
  ASSERT_GE(s.size(), 2u);
  EXPECT_EQ(s.back(), 0.0);
  EXPECT_TRUE(std::is_sorted(s.rbegin(), s.rend()));
}

TEST(SolveCell, ConstantWeightCorrectorVanishes) {
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const FluxModel m(2, p, Weight::constant(2, 2.0));
    const Corrector c = solve_cell(m, {0.6, -0.8}, PeriodicGrid(2, 16));
    EXPECT_LE(sup_norm(c.N), 1e-12) << "p " << p;
    EXPECT_LE(c.residual, 1e-12) << "p " << p;
  }
}

TEST(SolveCell, OneDimensionalFluxConstancy) {
  const FluxModel m(1, 2.0, trig1d());
  const PeriodicGrid g(1, 512);
  const Corrector c = solve_cell(m, {1.0, 0.0}, g);
  const double ahat = std::sqrt(3.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(c.P(0, i) - ahat / m.weight().scalar(g.point(i))));
  EXPECT_LE(err, 1e-3);
}

TEST(SolveCell, OneDimensionalNonlinearFluxConstancy) {
  const double p = 3.0;
  const FluxModel m(1, p, trig1d());
  const PeriodicGrid g(1, 512);
  const Corrector c = solve_cell(m, {1.0, 0.0}, g);
  const double ahat = harmonic_oracle(p);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(c.P(0, i) - std::pow(ahat / m.weight().scalar(g.point(i)), 1.0 / (p - 1))));
  EXPECT_LE(err, 1e-3);
}

TEST(SolveCell, CorrectorScalesLinearly) {
  const FluxModel m(2, 3.0, layered2d());
  const PeriodicGrid g(2, 32);
  CellSolveConfig cfg;
  cfg.tol = 1e-12;
  const Vec xi{0.6, 0.8};
  const Corrector c1 = solve_cell(m, xi, g, cfg);
  const Corrector c2 = solve_cell(m, 2.0 * xi, g, cfg);
  EXPECT_LE(lp_norm(c2.N - 2.0 * c1.N, 2.0), 1e-8 * lp_norm(c2.N, 2.0));
}

TEST(SolveCell, PicardAgreesWithNewton) {
  const FluxModel m(1, 3.0, trig1d());
  const PeriodicGrid g(1, 128);
  CellSolveConfig cfg;
  cfg.tol = 1e-10;
  const Corrector a = solve_cell(m, {1.0, 0.0}, g, cfg);
  cfg.strategy = Strategy::picard;
  cfg.max_iter = 2000;
  const Corrector b = solve_cell(m, {1.0, 0.0}, g, cfg);
  EXPECT_LE(lp_norm(a.N - b.N, 2.0), 1e-7);
}

TEST(SolveCell, ReportsFailureWithBestIterate) {
  const FluxModel m(2, 4.0, layered2d());
  CellSolveConfig cfg;
  cfg.max_iter = 1;
  cfg.mu_schedule = {0.0};
  try {
    solve_cell(m, {1.0, 0.3}, PeriodicGrid(2, 32), cfg);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.best_residual(), 0.0);
    EXPECT_EQ(e.best_iterate().size(), 32u * 32u);
  }
}

TEST(SolveCell, DimensionMismatchRejected) {
  EXPECT_THROW(solve_cell(FluxModel(1, 2.0, trig1d()), {1.0, 0.0}, PeriodicGrid(2, 16)), PreconditionError);
}

TEST(EffectiveFlux, ConstantWeight) {
  for (double p : {1.5, 3.0}) {
    const FluxModel m(2, p, Weight::constant(2, 2.0));
    const Vec xi{0.3, 1.1};
    const Vec a = effective_flux(m, xi, PeriodicGrid(2, 16));
    const double s = 2.0 * std::pow(norm(xi), p - 2);
    EXPECT_LE(norm(a - s * xi), 1e-10) << "p " << p;
  }
}

TEST(EffectiveFlux, HarmonicMeanAtP2) {
  const Vec a = effective_flux(FluxModel(1, 2.0, trig1d()), {1.0, 0.0}, PeriodicGrid(1, 512));
  EXPECT_NEAR(a[0], std::sqrt(3.0), 1e-4);
}

TEST(EffectiveFlux, HomogeneousOfDegreePMinusOne) {
  const double p = 3.0;
  const FluxModel m(2, p, layered2d());
  const PeriodicGrid g(2, 32);
  CellSolveConfig cfg;
  cfg.tol = 1e-12;
  const Vec xi{0.6, 0.8};
  const Vec a1 = effective_flux(m, xi, g, cfg);
  const Vec a2 = effective_flux(m, 2.0 * xi, g, cfg);
  EXPECT_LE(norm(a2 - std::pow(2.0, p - 1) * a1), 1e-8 * norm(a2));
}

TEST(Oracle1d, ConstantWeight) {
  for (double p : {1.5, 2.0, 4.0}) EXPECT_NEAR(effective_flux_1d_oracle(FluxModel(1, p, Weight::constant(1, 2.5))), 2.5, 1e-12);
}

TEST(Oracle1d, MatchesClosedFormAndGolden) {
  EXPECT_NEAR(effective_flux_1d_oracle(FluxModel(1, 2.0, trig1d())), std::sqrt(3.0), 1e-10);
  EXPECT_NEAR(effective_flux_1d_oracle(FluxModel(1, 3.0, trig1d())), 1.79810240734695256468, 1e-12);
  EXPECT_NEAR(effective_flux_1d_oracle(FluxModel(1, 3.0, trig1d())), harmonic_oracle(3.0), 1e-10);
}

TEST(Oracle1d, RequiresOneDimension) {
  EXPECT_THROW(effective_flux_1d_oracle(FluxModel(2, 2.0, layered2d())), PreconditionError);
}

TEST(CorrectorBounds, ZeroGradient) {
  const Corrector c = solve_cell(FluxModel(1, 3.0, trig1d()), {0.0, 0.0}, PeriodicGrid(1, 64));
  EXPECT_EQ(sup_norm(c.N), 0.0);
  const CorrectorBounds b = corrector_bounds_check(c, 3.0);
  EXPECT_EQ(b.n_lp, 0.0);
  EXPECT_EQ(b.grad_sup, 0.0);
}

TEST(CorrectorBounds, ConstantWeight) {
  const Corrector c = solve_cell(FluxModel(2, 3.0, Weight::constant(2, 1.0)), {1.0, 1.0}, PeriodicGrid(2, 16));
  const CorrectorBounds b = corrector_bounds_check(c, 3.0);
  EXPECT_LE(b.grad_sup, 1e-12);
  EXPECT_LE(b.n_lp, 1e-12);
}

TEST(CorrectorBounds, OneDimensionalClosedForm) {
  const FluxModel m(1, 2.0, trig1d());
  const Corrector c = solve_cell(m, {1.0, 0.0}, PeriodicGrid(1, 512));
  const double ahat = std::sqrt(3.0);
  const double expected = std::max(ahat / 1.0 - 1.0, 1.0 - ahat / 3.0);
  EXPECT_NEAR(corrector_bounds_check(c, 2.0).grad_sup, expected, 1e-3);
}

TEST(HolderInXi, LipschitzAtP2) {
  const HolderFit f = holder_in_xi(FluxModel(2, 2.0, layered2d()), PeriodicGrid(2, 32), {});
  EXPECT_GE(f.fit.slope, 0.95);
}

TEST(HolderInXi, OneDimensionalP4) {
  const HolderFit f = holder_in_xi(FluxModel(1, 4.0, trig1d()), PeriodicGrid(1, 128), {});
  EXPECT_GE(f.fit.slope, 2.0 / 4.0 - 0.1);
}

TEST(HolderPairs, DistancesSpanRange) {
  const auto pairs = holder_pairs({1.0, 0.0}, 2, 4);
  ASSERT_EQ(pairs.size(), 4u);
  for (const auto& [xi, d] : pairs) {
    EXPECT_NEAR(norm(xi), 1.0, 1e-15);
    EXPECT_NEAR(norm(xi - Vec{1.0, 0.0}), d, 1e-12);
    EXPECT_GE(d, 1e-4 * (1 - 1e-12));
    EXPECT_LE(d, 1e-1 * (1 + 1e-12));
  }
}

TEST(LinearityP2, Superposition) {
  EXPECT_LE(linearity_check_p2(FluxModel(2, 2.0, layered2d()), PeriodicGrid(2, 32)), 1e-8);
}

TEST(LinearityP2, RejectsNonlinearModel) {
  EXPECT_THROW(linearity_check_p2(FluxModel(2, 3.0, layered2d()), PeriodicGrid(2, 16)), PreconditionError);
}

}  // namespace
