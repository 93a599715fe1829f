#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "homog/cell_grid.hpp"

namespace {

using namespace homog;
constexpr double kPi = std::numbers::pi;

CellField random_field(const PeriodicGrid& g, Rank rank, unsigned seed) {
  CellField f(g, rank);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : f.values()) v = u(rng);
  return f;
}

TEST(PeriodicGrid, RejectsBadSizes) {
  EXPECT_THROW(PeriodicGrid(1, 100), PreconditionError);
  EXPECT_THROW(PeriodicGrid(1, 4), PreconditionError);
  EXPECT_THROW(PeriodicGrid(3, 16), PreconditionError);
  EXPECT_NO_THROW(PeriodicGrid(2, 8));
}

TEST(PeriodicGrid, IndexWrapsBothAxes) {
  const PeriodicGrid g(2, 8);
  EXPECT_EQ(g.index(-1, 0), g.index(7, 0));
  EXPECT_EQ(g.index(3, 9), g.index(3, 1));
  EXPECT_EQ(g.size(), 64u);
  const Vec y = g.point(g.index(2, 5));
  EXPECT_DOUBLE_EQ(y[0], 0.25);
  EXPECT_DOUBLE_EQ(y[1], 0.625);
}

TEST(Gradient, ConstantFieldGivesZero) {
  const PeriodicGrid g(2, 16);
  const CellField d = gradient(CellField::scalar(g, 3.5));
  EXPECT_EQ(d.rank(), Rank::vector);
  EXPECT_EQ(sup_norm(d), 0.0);
}

TEST(Gradient, SineMatchesAnalyticDerivative) {
  const PeriodicGrid g(2, 256);
  const CellField f = CellField::sample(g, [](const Vec& y) { return std::sin(2 * kPi * y[0]); });
  const CellField d = gradient(f);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(d(0, i) - 2 * kPi * std::cos(2 * kPi * g.point(i)[0])));
    ASSERT_EQ(d(1, i), 0.0);
  }
  EXPECT_LE(err, 1e-3);
}

TEST(Gradient, IsLinear) {
  const PeriodicGrid g(2, 16);
  const CellField f = random_field(g, Rank::scalar, 1);
  const CellField a = gradient(2.5 * f);
  const CellField b = 2.5 * gradient(f);
  for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
}

TEST(Divergence, ConstantVectorGivesZero) {
  const PeriodicGrid g(2, 16);
  EXPECT_EQ(sup_norm(divergence(CellField::vector(g, 1.25))), 0.0);
}

TEST(Divergence, OfSineGradientMatchesLaplacian) {
  const PeriodicGrid g(2, 256);
  const CellField f = CellField::sample(g, [](const Vec& y) { return std::sin(2 * kPi * y[0]); });
  const CellField lap = divergence(gradient(f));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(lap(0, i) + 4 * kPi * kPi * std::sin(2 * kPi * g.point(i)[0])));
  EXPECT_LE(err, 1e-2);
}

TEST(Divergence, IsNegativeAdjointOfGradient) {
  for (int dim : {1, 2}) {
    const PeriodicGrid g(dim, 32);
    const CellField u = random_field(g, Rank::scalar, 2);
    const CellField v = random_field(g, Rank::vector, 3);
    const double lhs = inner(gradient(u), v);
    const double rhs = -inner(u, divergence(v));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (1.0 + std::abs(lhs))) << "dim " << dim;
  }
}

TEST(Mean, ConstantAndProjection) {
  const PeriodicGrid g(2, 16);
  const CellField c = CellField::scalar(g, 5.0);
  EXPECT_DOUBLE_EQ(mean(c)[0], 5.0);
  EXPECT_LE(sup_norm(project_zero_mean(c)), 1e-15);
}

TEST(Mean, SineHasZeroMean) {
  const PeriodicGrid g(2, 64);
  const CellField f = CellField::sample(g, [](const Vec& y) { return std::sin(2 * kPi * y[0]); });
  EXPECT_LE(std::abs(mean(f)[0]), 1e-14);
}

TEST(Mean, ProjectionPlusMeanRestoresField) {
  const PeriodicGrid g(2, 16);
  const CellField f = random_field(g, Rank::vector, 4);
  const CellField z = project_zero_mean(f);
  const auto m = mean(f);
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(z(c, i) + m[static_cast<std::size_t>(c)], f(c, i), 1e-15);
}

TEST(LpNorm, ConstantHasUnitCellNorm) {
  const PeriodicGrid g(2, 16);
  for (double p : {1.5, 2.0, 3.0, 7.0}) EXPECT_NEAR(lp_norm(CellField::scalar(g, 2.0), p), 2.0, 1e-14);
}

TEST(LpNorm, PositiveHomogeneity) {
  const PeriodicGrid g(1, 64);
  const CellField f = random_field(g, Rank::scalar, 5);
  EXPECT_NEAR(lp_norm(3.0 * f, 3.0), 3.0 * lp_norm(f, 3.0), 1e-13);
}

TEST(LpNorm, SineL2) {
  const PeriodicGrid g(2, 256);
  const CellField f = CellField::sample(g, [](const Vec& y) { return std::sin(2 * kPi * y[0]); });
  EXPECT_NEAR(lp_norm(f, 2.0), 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Poisson, ZeroRhsGivesZero) {
  const PeriodicGrid g(2, 16);
  EXPECT_EQ(sup_norm(poisson_periodic(CellField::scalar(g))), 0.0);
}

TEST(Poisson, RecoversSineEigenfunction) {
  const PeriodicGrid g(1, 256);
  const auto s = [](const Vec& y) { return std::sin(2 * kPi * y[0]); };
  const CellField u = poisson_periodic(-4 * kPi * kPi * CellField::sample(g, s));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(u(0, i) - s(g.point(i))));
  // Wide-stencil symbol (sin(2 pi h)/h)^2 against 4 pi^2: relative error ~ (2 pi h)^2 / 3.
  EXPECT_LE(err, 2e-3);
}

TEST(Poisson, RoundTripOnRangeProjectedRhs) {
  for (int dim : {1, 2}) {
    const PeriodicGrid g(dim, 32);
    const CellField rhs = project_range(random_field(g, Rank::scalar, 6));
    const CellField u = poisson_periodic(rhs);
    EXPECT_LE(lp_norm(laplacian(u) - rhs, 2.0), 1e-10) << "dim " << dim;
    EXPECT_LE(std::abs(mean(u)[0]), 1e-13);
  }
}

TEST(Poisson, RejectsNonzeroMean) {
  const PeriodicGrid g(1, 16);
  EXPECT_THROW(poisson_periodic(CellField::scalar(g, 1.0)), PreconditionError);
}

TEST(ProjectRange, RemovesAlternatingModes) {
  const PeriodicGrid g(2, 16);
  const CellField checker = CellField::sample(g, [&](const Vec& y) {
    const int i = static_cast<int>(std::lround(y[0] * 16)), j = static_cast<int>(std::lround(y[1] * 16));
    return ((i + j) % 2 == 0) ? 1.0 : -1.0;
  });
  EXPECT_LE(sup_norm(project_range(checker)), 1e-14);
  EXPECT_NEAR(alternating_mode_norm(checker), 1.0, 1e-14);
  EXPECT_EQ(sup_norm(gradient(checker)), 0.0);
}

}  // namespace
