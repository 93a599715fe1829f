#pragma once

// Dirichlet problems on the unit box:
//   -div A(x/eps, grad u) = F   (oscillating)
//   -div Ahat(grad u)     = F   (homogenized)
// discretized with P1 elements on a DomainMesh and solved by damped Newton
// with mu-continuation. The flux weight is sampled at element centroids and
// the source is lumped to the nodes.

#include <functional>
#include <optional>
#include <vector>

#include "homog/domain_mesh.hpp"
#include "homog/effective_operator.hpp"
#include "homog/flux_model.hpp"

namespace homog {

struct DomainSolveConfig {
  double tol = 1e-9;
  int max_iter = 100;
  /// Empty: default_mu_schedule(p).
  std::vector<double> mu_schedule;
  double damping = 0.5;
  double stage_tol = 1e-6;
  /// Systems with at most this many unknowns use a sparse LDL^T factorization,
  /// larger ones preconditioned conjugate gradients.
  std::size_t direct_limit = 70000;
};

/// Per-element constitutive law.
class DomainLaw {
 public:
  virtual ~DomainLaw() = default;
  virtual int dim() const = 0;
  virtual double p() const = 0;
  virtual Vec flux(std::size_t element, const Vec& xi, double mu) const = 0;
  virtual Mat jacobian(std::size_t element, const Vec& xi, double mu) const = 0;
  virtual std::optional<double> energy(std::size_t element, const Vec& xi, double mu) const = 0;
};

/// A(x/eps, xi) with the weight sampled at each element centroid.
class OscillatingLaw final : public DomainLaw {
 public:
  OscillatingLaw(const FluxModel& model, double eps, const DomainMesh& mesh);
  int dim() const override { return dim_; }
  double p() const override { return p_; }
  Vec flux(std::size_t e, const Vec& xi, double mu) const override;
  Mat jacobian(std::size_t e, const Vec& xi, double mu) const override;
  std::optional<double> energy(std::size_t e, const Vec& xi, double mu) const override;

 private:
  int dim_;
  double p_;
  bool scalar_;
  std::vector<Mat> a_;
};

class HomogenizedLaw final : public DomainLaw {
 public:
  explicit HomogenizedLaw(const EffectiveOperator& op) : op_(op) {}
  int dim() const override { return op_.dim(); }
  double p() const override { return op_.p(); }
  Vec flux(std::size_t, const Vec& xi, double mu) const override { return op_.flux(xi, mu); }
  Mat jacobian(std::size_t, const Vec& xi, double mu) const override { return op_.jacobian(xi, mu); }
  std::optional<double> energy(std::size_t, const Vec& xi, double mu) const override { return op_.energy(xi, mu); }

 private:
  const EffectiveOperator& op_;
};

enum class SolutionKind { oscillating, homogenized };

struct Solution {
  NodalField u;
  NodalField grad_u;
  double residual = 0.0;
  /// Round-off level of the final stage; the solve also stops once the
  /// residual reaches it (0 when the target was met first).
  double residual_floor = 0.0;
  int iterations = 0;
  SolutionKind which = SolutionKind::homogenized;
  double eps = 0.0;  ///< 0 for the homogenized problem
};

using ScalarFunction = std::function<double(const Vec&)>;

/// Generic driver. Boundary nodes take g exactly. Throws SolverError with the
/// best iterate when a continuation stage fails.
Solution solve_dirichlet(const DomainLaw& law, const DomainMesh& mesh, const ScalarFunction& g,
                         const ScalarFunction& F, const DomainSolveConfig& cfg = {});

/// Requires eps * mesh.n() to be a positive integer.
Solution solve_oscillating(const FluxModel& model, double eps, const DomainMesh& mesh, const ScalarFunction& g,
                           const ScalarFunction& F, const DomainSolveConfig& cfg = {});

Solution solve_homogenized(const EffectiveOperator& op, const DomainMesh& mesh, const ScalarFunction& g,
                           const ScalarFunction& F, const DomainSolveConfig& cfg = {});

/// Strong-form nodal residual -div A - F (weak residual / h^d) on interior nodes.
NodalField residual_field(const DomainLaw& law, const NodalField& u, const ScalarFunction& F, double mu);

}  // namespace homog
