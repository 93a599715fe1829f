#pragma once

// Closed forms of the homogenized flux used by the domain solver.

#include <memory>
#include <optional>
#include <vector>

#include "homog/types.hpp"

namespace homog {

class EffectiveOperator {
 public:
  virtual ~EffectiveOperator() = default;

  virtual int dim() const = 0;
  virtual double p() const = 0;
  /// Regularized evaluation; mu = 0 is the exact homogeneous law.
  virtual Vec flux(const Vec& xi, double mu = 0.0) const = 0;
  virtual Mat jacobian(const Vec& xi, double mu = 0.0) const = 0;
  /// Potential when one is available.
  virtual std::optional<double> energy(const Vec& xi, double mu = 0.0) const;
};

/// c (mu^2 + |xi|^2)^((p-2)/2) xi.
class IsotropicEffective final : public EffectiveOperator {
 public:
  IsotropicEffective(int dim, double p, double c);
  int dim() const override { return dim_; }
  double p() const override { return p_; }
  double coefficient() const { return c_; }
  Vec flux(const Vec& xi, double mu) const override;
  Mat jacobian(const Vec& xi, double mu) const override;
  std::optional<double> energy(const Vec& xi, double mu) const override;

 private:
  int dim_;
  double p_;
  double c_;
};

/// Ahat xi for p = 2 with the symmetric part of a 2x2 effective matrix.
class LinearEffective final : public EffectiveOperator {
 public:
  LinearEffective(int dim, const Mat& a);
  int dim() const override { return dim_; }
  double p() const override { return 2.0; }
  const Mat& matrix() const { return a_; }
  Vec flux(const Vec& xi, double mu) const override;
  Mat jacobian(const Vec& xi, double mu) const override;
  std::optional<double> energy(const Vec& xi, double mu) const override;

 private:
  int dim_;
  Mat a_;
};

/// 2D homogeneous law from samples Ahat(e_k) on n equally spaced unit
/// directions e_k = (cos 2 pi k/n, sin 2 pi k/n):
///   Ahat_mu(xi) = (mu^2 + |xi|^2)^((p-2)/2) |xi| interp(xi/|xi|)
/// with periodic linear interpolation in angle. No potential; the Jacobian is
/// a symmetrized central difference.
class AngularEffective final : public EffectiveOperator {
 public:
  AngularEffective(double p, std::vector<Vec> samples);
  int dim() const override { return 2; }
  double p() const override { return p_; }
  Vec flux(const Vec& xi, double mu) const override;
  Mat jacobian(const Vec& xi, double mu) const override;
  /// Ahat on the unit circle at angle theta.
  Vec unit_flux(double theta) const;

 private:
  double p_;
  std::vector<Vec> samples_;
};

}  // namespace homog
