#include "homog/domain_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "homog/cell_solver.hpp"

namespace homog {

namespace {

Vec periodic_cell_point(const Vec& x, double eps) {
  Vec y = (1.0 / eps) * x;
  y[0] -= std::floor(y[0]);
  y[1] -= std::floor(y[1]);
  return y;
}

}  // namespace

OscillatingLaw::OscillatingLaw(const FluxModel& model, double eps, const DomainMesh& mesh)
    : dim_(model.dim()), p_(model.p()), scalar_(model.weight().is_scalar()) {
  if (mesh.dim() != model.dim()) throw PreconditionError("mesh and model dimensions differ");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  a_.reserve(mesh.elements().size());
  for (const auto& e : mesh.elements()) a_.push_back(model.weight().matrix(periodic_cell_point(e.centroid, eps)));
}

Vec OscillatingLaw::flux(std::size_t e, const Vec& xi, double mu) const { return law::flux(a_[e], xi, p_, mu); }
Mat OscillatingLaw::jacobian(std::size_t e, const Vec& xi, double mu) const {
  return law::jacobian(a_[e], xi, p_, mu);
}
std::optional<double> OscillatingLaw::energy(std::size_t e, const Vec& xi, double mu) const {
  if (!scalar_) return std::nullopt;
  return law::energy(a_[e][0], xi, p_, mu);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using DVec = Eigen::VectorXd;

struct System {
  const DomainMesh& mesh;
  std::vector<long> unknown;  // node -> unknown index or -1
  long count = 0;
  std::vector<double> load;   // lumped F h^d per node
  double vol;

  System(const DomainMesh& m, const ScalarFunction& F) : mesh(m), unknown(m.size(), -1), load(m.size(), 0.0) {
    vol = std::pow(m.spacing(), m.dim());
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m.is_boundary(k)) continue;
      unknown[k] = count++;
      load[k] = F ? F(m.point(k)) * vol : 0.0;
    }
  }

  int local_nodes() const { return mesh.dim() + 1; }

  Vec element_gradient(const Element& e, std::span<const double> u) const {
    Vec g{0.0, 0.0};
    for (int a = 0; a < local_nodes(); ++a) g = g + u[e.nodes[a]] * e.grads[a];
    return g;
  }

  // Weak residual (energy gradient) on unknowns.
  template <class FluxFn>
  DVec residual(std::span<const double> u, FluxFn&& flux) const {
    DVec r = DVec::Zero(count);
    const auto& els = mesh.elements();
    for (std::size_t e = 0; e < els.size(); ++e) {
      const Vec A = flux(e, element_gradient(els[e], u));
      for (int a = 0; a < local_nodes(); ++a) {
        const long k = unknown[els[e].nodes[a]];
        if (k >= 0) r[k] += els[e].measure * dot(A, els[e].grads[a]);
      }
    }
    for (std::size_t n = 0; n < mesh.size(); ++n)
      if (unknown[n] >= 0) r[unknown[n]] -= load[n];
    return r;
  }

  template <class JacFn>
  SpMat hessian(std::span<const double> u, JacFn&& jac) const {
    std::vector<Eigen::Triplet<double>> trip;
    const auto& els = mesh.elements();
    trip.reserve(els.size() * 9);
    for (std::size_t e = 0; e < els.size(); ++e) {
      const Mat J = jac(e, element_gradient(els[e], u));
      for (int a = 0; a < local_nodes(); ++a) {
        const long ka = unknown[els[e].nodes[a]];
        if (ka < 0) continue;
        for (int b = 0; b < local_nodes(); ++b) {
          const long kb = unknown[els[e].nodes[b]];
          if (kb < 0) continue;
          trip.emplace_back(ka, kb, els[e].measure * dot(els[e].grads[a], matvec(J, els[e].grads[b])));
        }
      }
    }
    SpMat K(count, count);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
  }

  double residual_norm(const DVec& r) const { return r.norm() / std::sqrt(vol); }

  // Residual level reachable in double precision: a few ulps of |K||u| + |load|.
  double roundoff_floor(const SpMat& K, std::span<const double> u) const {
    DVec ua(count), la(count);
    for (std::size_t n = 0; n < mesh.size(); ++n)
      if (unknown[n] >= 0) {
        ua[unknown[n]] = std::abs(u[n]);
        la[unknown[n]] = std::abs(load[n]);
      }
    const DVec v = K.cwiseAbs() * ua + la;
    return 64.0 * std::numeric_limits<double>::epsilon() * residual_norm(v);
  }

  std::optional<double> energy(const DomainLaw& law, std::span<const double> u, double mu) const {
    double s = 0.0;
    const auto& els = mesh.elements();
    for (std::size_t e = 0; e < els.size(); ++e) {
      const auto w = law.energy(e, element_gradient(els[e], u), mu);
      if (!w) return std::nullopt;
      s += els[e].measure * *w;
    }
    for (std::size_t n = 0; n < mesh.size(); ++n) s -= load[n] * u[n];
    return s;
  }

  void add_step(std::vector<double>& u, const DVec& d, double t) const {
    for (std::size_t n = 0; n < mesh.size(); ++n)
      if (unknown[n] >= 0) u[n] += t * d[unknown[n]];
  }
};

DVec solve_linear(const SpMat& K, const DVec& rhs, bool symmetric, std::size_t direct_limit) {
  const auto n = static_cast<std::size_t>(K.rows());
  DVec x;
  if (symmetric && n <= direct_limit) {
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success) throw SolverError("sparse factorization failed", INFINITY);
    x = ldlt.solve(rhs);
  } else if (symmetric) {
    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(20000);
    cg.compute(K);
    if (cg.info() != Eigen::Success) throw SolverError("preconditioner setup failed", INFINITY);
    x = cg.solve(rhs);
  } else {
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU failed", INFINITY);
    x = lu.solve(rhs);
  }
  return x;
}

bool law_is_symmetric(const DomainLaw& law, const DomainMesh& mesh) {
  if (law.dim() == 1 || mesh.elements().empty()) return true;
  // Probe one element with a generic gradient.
  const Mat J = law.jacobian(0, {0.37, -0.61}, 1.0);
  return std::abs(J[1] - J[2]) <= 1e-12 * (std::abs(J[0]) + std::abs(J[3]));
}

}  // namespace

Solution solve_dirichlet(const DomainLaw& law, const DomainMesh& mesh, const ScalarFunction& g,
                         const ScalarFunction& F, const DomainSolveConfig& cfg) {
  if (law.dim() != mesh.dim()) throw PreconditionError("law and mesh dimensions differ");
  if (!(cfg.tol > 0.0)) throw PreconditionError("tol must be positive");
  const auto schedule = cfg.mu_schedule.empty() ? default_mu_schedule(law.p()) : cfg.mu_schedule;
  for (std::size_t i = 0; i < schedule.size(); ++i)
    if (!(schedule[i] >= 0.0) || (i > 0 && !(schedule[i] < schedule[i - 1])))
      throw PreconditionError("mu schedule must be strictly decreasing and nonnegative");

  System sys(mesh, F);
  const bool symmetric = law_is_symmetric(law, mesh);
  std::vector<double> u(mesh.size(), 0.0);
  for (std::size_t k = 0; k < mesh.size(); ++k)
    if (mesh.is_boundary(k)) u[k] = g ? g(mesh.point(k)) : 0.0;

  double fscale = 1.0;
  for (double l : sys.load) fscale = std::max(fscale, std::abs(l) / sys.vol);

  Solution sol{NodalField(mesh, 1), NodalField(mesh, mesh.dim()), 0.0, 0.0, 0, SolutionKind::homogenized, 0.0};

  // Linear surrogate with the law's coefficient at unit regularization.
  if (sys.count > 0) {
    std::vector<Mat> J0(mesh.elements().size());
    for (std::size_t e = 0; e < J0.size(); ++e) J0[e] = law.jacobian(e, {0.0, 0.0}, 1.0);
    auto flux0 = [&](std::size_t e, const Vec& xi) { return matvec(J0[e], xi); };
    auto jac0 = [&](std::size_t e, const Vec&) { return J0[e]; };
    const DVec r = sys.residual(u, flux0);
    const DVec d = solve_linear(sys.hessian(u, jac0), -r, symmetric, cfg.direct_limit);
    sys.add_step(u, d, 1.0);
  }

  double res = 0.0;
  double floor = 0.0;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const double mu = schedule[s];
    const bool last = s + 1 == schedule.size();
    const double target = (last ? cfg.tol : std::max(cfg.tol, cfg.stage_tol)) * fscale;
    auto flux = [&](std::size_t e, const Vec& xi) { return law.flux(e, xi, mu); };
    auto jac = [&](std::size_t e, const Vec& xi) { return law.jacobian(e, xi, mu); };

    DVec r = sys.residual(u, flux);
    res = sys.residual_norm(r);
    auto E = sys.energy(law, u, mu);
    int it = 0;
    floor = 0.0;
    while (res > target && sys.count > 0) {
      const SpMat K = sys.hessian(u, jac);
      floor = sys.roundoff_floor(K, u);
      if (res <= floor) break;
      if (it >= cfg.max_iter) throw SolverError("domain Newton iteration did not converge", res, u);
      ++it;
      const DVec d = solve_linear(K, -r, symmetric, cfg.direct_limit);
      const double slope = r.dot(d);
      double t = 1.0;
      bool accepted = false;
      while (t > 1e-12) {
        std::vector<double> trial = u;
        sys.add_step(trial, d, t);
        const DVec rt = sys.residual(trial, flux);
        const double rest = sys.residual_norm(rt);
        bool ok;
        std::optional<double> Et;
        if (E) {
          Et = sys.energy(law, trial, mu);
          const double roundoff = 1e-13 * std::max(std::abs(*E), 1e-300);
          ok = (*Et <= *E + 1e-4 * t * slope) || (std::abs(*Et - *E) <= roundoff && rest < res);
        } else {
          ok = rest <= (1.0 - 1e-4 * t) * res;
        }
        if (ok && std::isfinite(rest)) {
          u = std::move(trial);
          r = rt;
          res = rest;
          E = Et;
          accepted = true;
          break;
        }
        t *= cfg.damping;
      }
      if (!accepted) throw SolverError("domain Newton line search stalled", res, u);
    }
    sol.iterations += it;
  }

  std::copy(u.begin(), u.end(), sol.u.values().begin());
  sol.grad_u = nodal_gradient(sol.u);
  sol.residual = res;
  sol.residual_floor = floor;
  return sol;
}

Solution solve_oscillating(const FluxModel& model, double eps, const DomainMesh& mesh, const ScalarFunction& g,
                           const ScalarFunction& F, const DomainSolveConfig& cfg) {
  if (!mesh.compatible(eps)) throw PreconditionError("eps * n must be a positive integer");
  OscillatingLaw law(model, eps, mesh);
  Solution s = solve_dirichlet(law, mesh, g, F, cfg);
  s.which = SolutionKind::oscillating;
  s.eps = eps;
  return s;
}

Solution solve_homogenized(const EffectiveOperator& op, const DomainMesh& mesh, const ScalarFunction& g,
                           const ScalarFunction& F, const DomainSolveConfig& cfg) {
  HomogenizedLaw law(op);
  return solve_dirichlet(law, mesh, g, F, cfg);
}

NodalField residual_field(const DomainLaw& law, const NodalField& u, const ScalarFunction& F, double mu) {
  const DomainMesh& mesh = u.mesh();
  System sys(mesh, F);
  auto flux = [&](std::size_t e, const Vec& xi) { return law.flux(e, xi, mu); };
  const DVec r = sys.residual(u.values(), flux);
  NodalField out(mesh, 1);
  for (std::size_t k = 0; k < mesh.size(); ++k)
    if (sys.unknown[k] >= 0) out(0, k) = r[sys.unknown[k]] / sys.vol;
  return out;
}

}  // namespace homog
