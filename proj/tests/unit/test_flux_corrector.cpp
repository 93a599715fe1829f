#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homog/flux_corrector.hpp"

namespace {

using namespace homog;
constexpr double kPi = std::numbers::pi;

Weight layered2d() { return Weight(LayeredWeight{Profile{2.0, {{1.0, 1, 0.0}}}}, 2); }

TEST(OscillationFlux, ConstantWeightVanishes) {
  const FluxModel m(2, 3.0, Weight::constant(2, 2.0));
  const Corrector c = solve_cell(m, {0.5, 1.0}, PeriodicGrid(2, 16));
  const CellField b = oscillation_flux(m, c, effective_flux(m, c));
  EXPECT_LE(sup_norm(b), 1e-12);
  const FluxCorrectorSet set = build_flux_corrector(b, c.xi);
  EXPECT_LE(sup_norm(set.E_matrix()), 1e-12);
}

TEST(OscillationFlux, DivergenceIsCellResidual) {
  const FluxModel m(2, 3.0, layered2d());
  const Corrector c = solve_cell(m, {0.6, 0.8}, PeriodicGrid(2, 32));
  const CellField b = oscillation_flux(m, c, effective_flux(m, c));
  const double div_b = lp_norm(divergence(b), 2.0);
  EXPECT_NEAR(div_b, lp_norm(cell_residual(m, c), 2.0), 1e-14);
  EXPECT_LE(div_b, 1e-9 * std::max(1.0, 3.0 * std::pow(1.0, 2.0)));
}

TEST(OscillationFlux, OneDimensionalFluxIsConstant) {
  const FluxModel m(1, 2.0, Weight(TrigWeight{2.0, {{1.0, {1, 0}, 0.0}}}, 1));
  const Corrector c = solve_cell(m, {1.0, 0.0}, PeriodicGrid(1, 512));
  EXPECT_LE(sup_norm(oscillation_flux(m, c, effective_flux(m, c))), 1e-3);
}

TEST(OscillationFlux, DimensionMismatch) {
  const FluxModel m1(1, 2.0, Weight::constant(1, 1.0));
  const FluxModel m2(2, 2.0, Weight::constant(2, 1.0));
  const Corrector c = solve_cell(m2, {1.0, 0.0}, PeriodicGrid(2, 8));
  EXPECT_THROW(oscillation_flux(m1, c, {1.0, 0.0}), PreconditionError);
}

TEST(FluxCorrector, ZeroOscillationGivesZero) {
  const PeriodicGrid g(2, 16);
  const CellField b = CellField::vector(g);
  const FluxCorrectorSet set = build_flux_corrector(b);
  EXPECT_EQ(sup_norm(set.E_matrix()), 0.0);
  const FluxCorrectorReport r = validate_flux_corrector(set, b);
  EXPECT_EQ(r.r1, 0.0);
  EXPECT_EQ(r.r2, 0.0);
  EXPECT_TRUE(r.success);
}

TEST(FluxCorrector, OneDimensionalIsZero) {
  const PeriodicGrid g(1, 32);
  const CellField b = CellField::sample(g, [](const Vec& y) { return std::sin(2 * kPi * y[0]); });
  CellField bv = CellField::vector(g);
  for (std::size_t i = 0; i < g.size(); ++i) bv(0, i) = b(0, i);
  const FluxCorrectorSet set = build_flux_corrector(bv);
  const CellField E = set.E_matrix();
  EXPECT_EQ(E.components(), 1);
  EXPECT_EQ(sup_norm(E), 0.0);
}

// a = 2 + sin(2 pi y1), p = 2, xi = e2: N = 0, b = (0, sin 2 pi y1) and
// laplacian f2 = b2 is diagonal in Fourier, so E_01 = d1 f2 has the closed form
// -cos(2 pi y1) h / sin(2 pi h) for the centered-difference symbol.
TEST(FluxCorrector, LayeredCaseMatchesFourierSolution) {
  const int n = 64;
  const PeriodicGrid g(2, n);
  const FluxModel m(2, 2.0, layered2d());
  const FluxCorrectorSet set = flux_corrector_at(m, {0.0, 1.0}, g);
  const CellField E01 = set.E(0, 1);
  const double h = 1.0 / n;
  double err = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double exact = -std::cos(2 * kPi * g.point(i)[0]) * h / std::sin(2 * kPi * h);
    err = std::max(err, std::abs(E01(0, i) - exact));
    mag = std::max(mag, std::abs(E01(0, i)));
  }
  EXPECT_LE(err, 1e-10);
  EXPECT_NEAR(mag, 1.0 / (2 * kPi), 1e-3);
  const CellField E10 = set.E(1, 0);
  for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(E10(0, i), -E01(0, i));
  EXPECT_EQ(sup_norm(set.E(0, 0)), 0.0);
}

TEST(FluxCorrector, IdentitiesOnLayeredBenchmark) {
  for (double p : {2.0, 3.0}) {
    const FluxModel m(2, p, layered2d());
    const PeriodicGrid g(2, 64);
    const Corrector c = solve_cell(m, {0.6, 0.8}, g);
    const CellField b = oscillation_flux(m, c, effective_flux(m, c));
    const FluxCorrectorReport r = validate_flux_corrector(build_flux_corrector(b, c.xi), b);
    EXPECT_EQ(r.antisymmetry_defect, 0.0);
    EXPECT_LE(r.r1, 1e-6) << "p " << p;
    EXPECT_LE(r.mean_b, 1e-8) << "p " << p;
    EXPECT_TRUE(r.success);
  }
}

TEST(FluxCorrector, ColumnDivergenceReproducesB) {
  const PeriodicGrid g(2, 32);
  const FluxCorrectorSet set = flux_corrector_at(FluxModel(2, 3.0, layered2d()), {1.0, 0.5}, g);
  for (int i = 0; i < 2; ++i) {
    const CellField d = divergence(set.column(i));
    CellField bi = CellField::scalar(g);
    for (std::size_t k = 0; k < g.size(); ++k) bi(0, k) = set.b()(i, k);
    EXPECT_LE(lp_norm(d - project_range(bi), 2.0), 1e-10);
  }
}

TEST(HolderE, LinearAtP2) {
  EXPECT_GE(holder_E_in_xi(FluxModel(2, 2.0, layered2d()), PeriodicGrid(2, 32), {}).fit.slope, 0.95);
}

TEST(HolderE, LayeredP4) {
  EXPECT_GE(holder_E_in_xi(FluxModel(2, 4.0, layered2d()), PeriodicGrid(2, 32), {}).fit.slope, 2.0 / 4.0 - 0.15);
}

TEST(HolderE, RequiresTwoDimensions) {
  EXPECT_THROW(holder_E_in_xi(FluxModel(1, 2.0, Weight::constant(1, 1.0)), PeriodicGrid(1, 16), {}), PreconditionError);
}

}  // namespace
