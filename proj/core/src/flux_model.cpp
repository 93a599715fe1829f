#include "homog/flux_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "homog/seeding.hpp"

namespace homog {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr int bound_samples = 1024;

struct ScalarEval {
  const Vec& y;
  double operator()(const ConstantWeight& w) const { return w.value; }
  double operator()(const TrigWeight& w) const {
    double v = w.base;
    for (const auto& m : w.modes) v += m.amplitude * std::sin(two_pi * (m.k[0] * y[0] + m.k[1] * y[1]) + m.phase);
    return v;
  }
  double operator()(const DiagonalShiftWeight& w) const { return w.profile(y[0] + y[1]); }
  double operator()(const LayeredWeight& w) const { return w.profile(y[0]); }
  double operator()(const CustomWeight& w) const { return w.fn(y); }
};

// Smallest/largest eigenvalue of a symmetric 2x2 (or the scalar for d = 1).
std::pair<double, double> eig_bounds(const Mat& a, int dim) {
  if (dim == 1) return {a[0], a[0]};
  const double m = 0.5 * (a[0] + a[3]);
  const double r = std::hypot(0.5 * (a[0] - a[3]), a[1]);
  return {m - r, m + r};
}

}  // namespace

double Profile::operator()(double s) const {
  double v = base;
  for (const auto& m : modes) v += m.amplitude * std::sin(two_pi * m.k * s + m.phase);
  return v;
}

double evaluate(const ScalarWeightSpec& spec, const Vec& y) { return std::visit(ScalarEval{y}, spec); }

Weight::Weight(WeightSpec spec, int dim) : spec_(std::move(spec)), dim_(dim) {
  if (dim != 1 && dim != 2) throw PreconditionError("weight dimension must be 1 or 2");
  if (auto* m = std::get_if<MatrixWeight>(&spec_)) {
    if (m->entries.size() != static_cast<std::size_t>(dim * dim))
      throw PreconditionError("matrix weight needs dim*dim entries");
  }
  if (auto* c = std::get_if<CustomWeight>(&spec_)) {
    if (!c->fn) throw PreconditionError("custom weight has no function");
  }

  lower_ = std::numeric_limits<double>::infinity();
  upper_ = -std::numeric_limits<double>::infinity();
  const int nj = dim == 1 ? 1 : bound_samples;
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < bound_samples; ++i) {
      const Vec y{static_cast<double>(i) / bound_samples,
                  dim == 1 ? 0.0 : static_cast<double>(j) / bound_samples};
      const Mat a = matrix(y);
      if (!is_scalar() && dim == 2) {
        const double a01 = a[1], a10 = a[2];
        if (std::abs(a01 - a10) > 1e-12 * (1.0 + std::abs(a01)))
          throw PreconditionError("matrix weight is not symmetric");
      }
      const auto [lo, hi] = eig_bounds(a, dim);
      if (!std::isfinite(lo) || !std::isfinite(hi)) throw PreconditionError("weight is not finite");
      lower_ = std::min(lower_, lo);
      upper_ = std::max(upper_, hi);
    }
  }
  if (!(lower_ > 0.0)) throw PreconditionError("weight is not uniformly positive");
}

double Weight::scalar(const Vec& y) const {
  return std::visit(
      [&](const auto& w) -> double {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, MatrixWeight>) {
          throw UnsupportedError("matrix weight has no scalar value");
        } else {
          return ScalarEval{y}(w);
        }
      },
      spec_);
}

Mat Weight::matrix(const Vec& y) const {
  if (auto* m = std::get_if<MatrixWeight>(&spec_)) {
    if (dim_ == 1) return {evaluate(m->entries[0], y), 0.0, 0.0, 0.0};
    return {evaluate(m->entries[0], y), evaluate(m->entries[1], y), evaluate(m->entries[2], y),
            evaluate(m->entries[3], y)};
  }
  const double a = scalar(y);
  return dim_ == 1 ? Mat{a, 0.0, 0.0, 0.0} : identity_mat(a);
}

FluxModel::FluxModel(int dim, double p, Weight weight, double mu_reg)
    : dim_(dim), p_(p), weight_(std::move(weight)), mu_reg_(mu_reg) {
  if (dim != 1 && dim != 2) throw PreconditionError("model dimension must be 1 or 2");
  if (!(p > 1.0 && p <= 20.0)) throw PreconditionError("p must lie in (1, 20]");
  if (!(mu_reg >= 0.0) || !std::isfinite(mu_reg)) throw PreconditionError("mu_reg must be >= 0");
  if (weight_.dim() != dim) throw PreconditionError("weight and model dimensions differ");
}

namespace law {

double secant_factor(const Vec& xi, double p, double mu) {
  const double s = mu * mu + dot(xi, xi);
  if (p == 2.0) return 1.0;
  if (s == 0.0) return p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(s, 0.5 * (p - 2.0));
}

Vec flux(const Mat& a, const Vec& xi, double p, double mu) {
  const double s = mu * mu + dot(xi, xi);
  if (s == 0.0) return {0.0, 0.0};
  return secant_factor(xi, p, mu) * matvec(a, xi);
}

Mat jacobian(const Mat& a, const Vec& xi, double p, double mu) {
  const double s = mu * mu + dot(xi, xi);
  if (s == 0.0) {
    if (p < 2.0) throw PreconditionError("flux Jacobian is singular at xi = 0 for p < 2 and mu = 0; use a positive mu");
    if (p > 2.0) return {0.0, 0.0, 0.0, 0.0};
    return a;
  }
  const double f = secant_factor(xi, p, mu);
  const double c = (p - 2.0) / s;
  // d/dxi [f(s) a xi] = f (a + c (a xi) xi^T)
  const Vec ax = matvec(a, xi);
  return {f * (a[0] + c * ax[0] * xi[0]), f * (a[1] + c * ax[0] * xi[1]), f * (a[2] + c * ax[1] * xi[0]),
          f * (a[3] + c * ax[1] * xi[1])};
}

double energy(double a, const Vec& xi, double p, double mu) {
  const double s = mu * mu + dot(xi, xi);
  return a * std::pow(s, 0.5 * p) / p;
}

}  // namespace law

Vec eval_flux(const FluxModel& model, const Vec& y, const Vec& xi) {
  return law::flux(model.weight().matrix(y), xi, model.p(), model.mu_reg());
}

double eval_energy_density(const FluxModel& model, const Vec& y, const Vec& xi) {
  if (!model.weight().is_scalar()) throw UnsupportedError("no energy density for matrix weights");
  return law::energy(model.weight().scalar(y), xi, model.p(), model.mu_reg());
}

Mat flux_jacobian(const FluxModel& model, const Vec& y, const Vec& xi) {
  return law::jacobian(model.weight().matrix(y), xi, model.p(), model.mu_reg());
}

namespace {

Vec random_point(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = u(rng);
  const double b = u(rng);
  return {a, dim == 1 ? 0.0 : b};
}

Vec random_xi(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng);
  const double b = u(rng);
  return {a, dim == 1 ? 0.0 : b};
}

}  // namespace

HomogeneityReport check_homogeneity(const FluxModel& model, int n_samples, std::uint64_t seed,
                                    std::vector<double> factors) {
  auto rng = make_rng(seed, "check_homogeneity");
  HomogeneityReport rep;
  for (int s = 0; s < n_samples; ++s) {
    const Vec y = random_point(rng, model.dim());
    const Vec xi = random_xi(rng, model.dim());
    const Vec a = eval_flux(model, y, xi);
    for (double t : factors) {
      const Vec at = eval_flux(model, y, t * xi);
      const Vec ref = std::pow(t, model.p() - 1.0) * a;
      const double den = norm(ref);
      if (den == 0.0) continue;
      rep.max_defect = std::max(rep.max_defect, norm(at - ref) / den);
    }
    ++rep.samples;
  }
  rep.flagged = rep.max_defect > 1e-12;
  return rep;
}

SandwichReport check_monotonicity_growth(const FluxModel& model, int n_samples, std::uint64_t seed) {
  auto rng = make_rng(seed, "check_monotonicity_growth");
  SandwichReport rep;
  rep.mu0 = std::numeric_limits<double>::infinity();
  rep.mu1 = 0.0;
  const double p = model.p();
  for (int s = 0; s < n_samples; ++s) {
    const Vec y = random_point(rng, model.dim());
    const Vec xi = random_xi(rng, model.dim());
    const Vec xj = random_xi(rng, model.dim());
    ++rep.samples;
    const Vec d = xi - xj;
    const double dd = dot(d, d);
    const double sum = norm(xi) + norm(xj);
    if (dd == 0.0 || sum == 0.0) {
      ++rep.skipped;
      continue;
    }
    const double lhs = dot(eval_flux(model, y, xi) - eval_flux(model, y, xj), d);
    const double ref = std::pow(sum, p - 2.0) * dd;
    const double ratio = lhs / ref;
    if (!(lhs > 0.0)) ++rep.violations;
    rep.mu0 = std::min(rep.mu0, ratio);
    rep.mu1 = std::max(rep.mu1, ratio);
  }
  if (rep.samples == rep.skipped) rep.mu0 = 0.0;
  return rep;
}

LipschitzReport check_lipschitz_in_y(const FluxModel& model, int n_samples, std::uint64_t seed) {
  auto rng = make_rng(seed, "check_lipschitz_in_y");
  std::uniform_real_distribution<double> log_r(std::log(1e-4), std::log(1e-1));
  std::uniform_real_distribution<double> angle(0.0, two_pi);
  LipschitzReport rep;
  for (int s = 0; s < n_samples; ++s) {
    const Vec y = random_point(rng, model.dim());
    const Vec xi = random_xi(rng, model.dim());
    const double r = std::exp(log_r(rng));
    const double th = angle(rng);
    const Vec e = model.dim() == 1 ? Vec{th < std::numbers::pi ? 1.0 : -1.0, 0.0} : Vec{std::cos(th), std::sin(th)};
    const Vec y2 = y + r * e;
    ++rep.samples;
    const double dy = norm(y2 - y);
    const double nx = norm(xi);
    if (dy == 0.0 || nx == 0.0) {
      ++rep.skipped;
      continue;
    }
    const double diff = norm(eval_flux(model, y, xi) - eval_flux(model, y2, xi));
    rep.mu2 = std::max(rep.mu2, diff / (dy * std::pow(nx, model.p() - 1.0)));
  }
  return rep;
}

}  // namespace homog
