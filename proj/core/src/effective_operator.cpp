#include "homog/effective_operator.hpp"

#include <cmath>
#include <numbers>

#include "homog/flux_model.hpp"

namespace homog {

std::optional<double> EffectiveOperator::energy(const Vec&, double) const { return std::nullopt; }

IsotropicEffective::IsotropicEffective(int dim, double p, double c) : dim_(dim), p_(p), c_(c) {
  if (dim != 1 && dim != 2) throw PreconditionError("effective operator dimension must be 1 or 2");
  if (!(p > 1.0)) throw PreconditionError("p must exceed 1");
  if (!(c > 0.0)) throw PreconditionError("effective coefficient must be positive");
}

Vec IsotropicEffective::flux(const Vec& xi, double mu) const { return law::flux(identity_mat(c_), xi, p_, mu); }
Mat IsotropicEffective::jacobian(const Vec& xi, double mu) const {
  return law::jacobian(identity_mat(c_), xi, p_, mu);
}
std::optional<double> IsotropicEffective::energy(const Vec& xi, double mu) const {
  return law::energy(c_, xi, p_, mu);
}

LinearEffective::LinearEffective(int dim, const Mat& a) : dim_(dim) {
  if (dim != 1 && dim != 2) throw PreconditionError("effective operator dimension must be 1 or 2");
  const double off = dim == 2 ? 0.5 * (a[1] + a[2]) : 0.0;
  a_ = {a[0], off, off, dim == 2 ? a[3] : 0.0};
  if (!(a_[0] > 0.0)) throw PreconditionError("effective matrix must be positive definite");
}

Vec LinearEffective::flux(const Vec& xi, double) const { return matvec(a_, xi); }
Mat LinearEffective::jacobian(const Vec&, double) const { return a_; }
std::optional<double> LinearEffective::energy(const Vec& xi, double) const { return 0.5 * dot(xi, matvec(a_, xi)); }

AngularEffective::AngularEffective(double p, std::vector<Vec> samples) : p_(p), samples_(std::move(samples)) {
  if (samples_.size() < 4) throw PreconditionError("angular table needs at least four directions");
}

Vec AngularEffective::unit_flux(double theta) const {
  const double n = static_cast<double>(samples_.size());
  double s = theta / (2.0 * std::numbers::pi) * n;
  s -= n * std::floor(s / n);
  const auto k = static_cast<std::size_t>(std::floor(s)) % samples_.size();
  const double w = s - std::floor(s);
  const Vec& a = samples_[k];
  const Vec& b = samples_[(k + 1) % samples_.size()];
  return (1.0 - w) * a + w * b;
}

Vec AngularEffective::flux(const Vec& xi, double mu) const {
  const double r = norm(xi);
  if (r == 0.0) return {0.0, 0.0};
  const double f = std::pow(mu * mu + r * r, 0.5 * (p_ - 2.0)) * r;
  return f * unit_flux(std::atan2(xi[1], xi[0]));
}

Mat AngularEffective::jacobian(const Vec& xi, double mu) const {
  const double step = 1e-6 * std::max(norm(xi), std::max(mu, 1e-8));
  Mat j{};
  for (int c = 0; c < 2; ++c) {
    Vec e{0.0, 0.0};
    e[c] = step;
    const Vec d = (1.0 / (2.0 * step)) * (flux(xi + e, mu) - flux(xi - e, mu));
    j[0 * 2 + c] = d[0];
    j[1 * 2 + c] = d[1];
  }
  const double off = 0.5 * (j[1] + j[2]);
  return {j[0], off, off, j[3]};
}

}  // namespace homog
