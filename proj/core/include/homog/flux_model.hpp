#pragma once

// Nonlinear periodic fluxes of weighted p-Laplace type,
//
//   A_mu(y, xi) = a(y) (mu^2 + |xi|^2)^((p-2)/2) xi,
//
// with a scalar or symmetric matrix weight a, plus sampled validators for the
// structural assumptions (homogeneity, monotonicity/growth sandwich,
// Lipschitz dependence on y).

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "homog/types.hpp"

namespace homog {

/// amplitude * sin(2 pi k.y + phase); k must be integral for periodicity.
struct TrigMode {
  double amplitude = 0.0;
  std::array<int, 2> k{0, 0};
  double phase = 0.0;
};

/// One-dimensional periodic profile g(s) = base + sum amplitude * sin(2 pi k s + phase).
struct ProfileMode {
  double amplitude = 0.0;
  int k = 0;
  double phase = 0.0;
};
struct Profile {
  double base = 1.0;
  std::vector<ProfileMode> modes;
  double operator()(double s) const;
};

struct ConstantWeight {
  double value = 1.0;
};
struct TrigWeight {
  double base = 1.0;
  std::vector<TrigMode> modes;
};
/// g(y_1 + ... + y_d); derivatives agree in every direction.
struct DiagonalShiftWeight {
  Profile profile;
};
/// g(y_1).
struct LayeredWeight {
  Profile profile;
};
/// Arbitrary 1-periodic closure supplied by library users.
struct CustomWeight {
  std::function<double(const Vec&)> fn;
  std::string name = "custom";
};

using ScalarWeightSpec =
    std::variant<ConstantWeight, TrigWeight, DiagonalShiftWeight, LayeredWeight, CustomWeight>;

/// Symmetric matrix weight a_ij(y), entries row-major (d*d of them).
struct MatrixWeight {
  std::vector<ScalarWeightSpec> entries;
};

using WeightSpec = std::variant<ConstantWeight, TrigWeight, DiagonalShiftWeight, LayeredWeight,
                                CustomWeight, MatrixWeight>;

double evaluate(const ScalarWeightSpec& spec, const Vec& y);

/// Validated weight with bounds estimated by dense sampling (1024 nodes per axis).
class Weight {
 public:
  Weight(WeightSpec spec, int dim);

  static Weight constant(int dim, double c) { return Weight(ConstantWeight{c}, dim); }

  int dim() const noexcept { return dim_; }
  bool is_scalar() const noexcept { return !std::holds_alternative<MatrixWeight>(spec_); }
  bool is_constant() const noexcept { return std::holds_alternative<ConstantWeight>(spec_); }
  const WeightSpec& spec() const noexcept { return spec_; }

  /// Scalar weights only.
  double scalar(const Vec& y) const;
  /// a(y) as a matrix; scalar weights give a(y) * I.
  Mat matrix(const Vec& y) const;

  /// Sampled lower/upper bounds (eigenvalue bounds for matrix weights).
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  WeightSpec spec_;
  int dim_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

class FluxModel {
 public:
  /// Throws PreconditionError unless p in (1, 20], mu_reg >= 0, dims agree.
  FluxModel(int dim, double p, Weight weight, double mu_reg = 0.0);

  int dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  double mu_reg() const noexcept { return mu_reg_; }
  const Weight& weight() const noexcept { return weight_; }

  FluxModel with_mu(double mu) const { return FluxModel(dim_, p_, weight_, mu); }

 private:
  int dim_;
  double p_;
  Weight weight_;
  double mu_reg_;
};

// Pointwise constitutive law for a given weight value. These are the kernels
// the solvers call after sampling the weight once per node.
namespace law {

Vec flux(const Mat& a, const Vec& xi, double p, double mu);
Mat jacobian(const Mat& a, const Vec& xi, double p, double mu);
/// Scalar factor s with A = s * a * xi.
double secant_factor(const Vec& xi, double p, double mu);
double energy(double a, const Vec& xi, double p, double mu);

}  // namespace law

Vec eval_flux(const FluxModel& model, const Vec& y, const Vec& xi);

/// W(y, xi) = a(y) (mu^2 + |xi|^2)^(p/2) / p. Throws UnsupportedError for
/// matrix weights (no potential is provided for them).
double eval_energy_density(const FluxModel& model, const Vec& y, const Vec& xi);

/// dA/dxi. Throws PreconditionError at the singular point p < 2, mu = 0, xi = 0.
Mat flux_jacobian(const FluxModel& model, const Vec& y, const Vec& xi);

struct HomogeneityReport {
  double max_defect = 0.0;  ///< max relative defect over samples and t
  bool flagged = false;     ///< defect above 1e-12 (expected when mu_reg > 0)
  int samples = 0;
};

/// Relative defect |A(y,t xi) - t^(p-1) A(y,xi)| / |t^(p-1) A(y,xi)| for t in
/// `factors` (default {0.5, 2, 10}).
HomogeneityReport check_homogeneity(const FluxModel& model, int n_samples, std::uint64_t seed,
                                    std::vector<double> factors = {0.5, 2.0, 10.0});

struct SandwichReport {
  double mu0 = 0.0;  ///< largest admissible lower constant
  double mu1 = 0.0;  ///< smallest admissible upper constant
  int violations = 0;  ///< samples with <A(xi)-A(xi'), xi-xi'> <= 0
  int samples = 0;
  int skipped = 0;
};

/// Fits the two-sided bound
///   mu0 (|xi|+|xi'|)^(p-2)|xi-xi'|^2 <= <A(y,xi)-A(y,xi'), xi-xi'> <= mu1 (...)
/// over random (y, xi, xi') with xi components uniform in [-1, 1].
SandwichReport check_monotonicity_growth(const FluxModel& model, int n_samples, std::uint64_t seed);

struct LipschitzReport {
  double mu2 = 0.0;
  int samples = 0;
  int skipped = 0;
};

/// Smallest mu2 with |A(y,xi) - A(y',xi)| <= mu2 |y-y'| |xi|^(p-1) on samples.
/// Pairs are y' = y + r*e with r log-uniform in [1e-4, 1e-1].
LipschitzReport check_lipschitz_in_y(const FluxModel& model, int n_samples, std::uint64_t seed);

}  // namespace homog
