#include "homog/cell_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "linear_solvers.hpp"
#include "spectral.hpp"

namespace homog {

namespace {

// Nodal samples of the weight plus the pointwise law, bound to one grid.
class CellProblem {
 public:
  CellProblem(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid)
      : model_(model), grid_(grid), xi_(xi), a_(grid.size()), scalar_(model.weight().is_scalar()) {
    for (std::size_t k = 0; k < grid.size(); ++k) a_[k] = model.weight().matrix(grid.point(k));
  }

  const PeriodicGrid& grid() const { return grid_; }
  bool has_energy() const { return scalar_; }

  CellField corrected(const CellField& N) const {
    CellField P = gradient(N);
    for (int c = 0; c < grid_.dim(); ++c)
      for (double& v : P.component(c)) v += xi_[c];
    return P;
  }

  Vec at(const CellField& f, std::size_t k) const {
    return {f(0, k), grid_.dim() == 2 ? f(1, k) : 0.0};
  }

  CellField flux(const CellField& P, double mu) const {
    CellField A = CellField::vector(grid_);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const Vec v = law::flux(a_[k], at(P, k), model_.p(), mu);
      for (int c = 0; c < grid_.dim(); ++c) A(c, k) = v[c];
    }
    return A;
  }

  double energy(const CellField& P, double mu) const {
    if (!scalar_) return std::numeric_limits<double>::quiet_NaN();
    double e = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) e += law::energy(a_[k][0], at(P, k), model_.p(), mu);
    return e * std::pow(grid_.spacing(), grid_.dim());
  }

  // Per-node linearization: Newton Jacobian or frozen secant coefficient.
  std::vector<Mat> jacobians(const CellField& P, double mu) const {
    std::vector<Mat> J(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) J[k] = law::jacobian(a_[k], at(P, k), model_.p(), mu);
    return J;
  }
  std::vector<Mat> secants(const CellField& P, double mu) const {
    std::vector<Mat> J(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const double s = law::secant_factor(at(P, k), model_.p(), mu);
      if (!std::isfinite(s))
        throw PreconditionError("secant coefficient is singular at P = 0 for p < 2 and mu = 0; use a positive mu");
      const Mat& a = a_[k];
      J[k] = {s * a[0], s * a[1], s * a[2], s * a[3]};
    }
    return J;
  }

  // out = -div(J grad v)
  void apply_operator(const std::vector<Mat>& J, std::span<const double> v, std::span<double> out) const {
    CellField u = CellField::scalar(grid_);
    std::copy(v.begin(), v.end(), u.values().begin());
    CellField g = gradient(u);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const Vec w = matvec(J[k], at(g, k));
      for (int c = 0; c < grid_.dim(); ++c) g(c, k) = w[c];
    }
    const CellField d = divergence(g);
    for (std::size_t k = 0; k < grid_.size(); ++k) out[k] = -d(0, k);
  }

  double mean_trace(const std::vector<Mat>& J) const {
    double t = 0.0;
    for (const auto& m : J) t += grid_.dim() == 1 ? m[0] : 0.5 * (m[0] + m[3]);
    return t / static_cast<double>(J.size());
  }

 private:
  const FluxModel& model_;
  PeriodicGrid grid_;
  Vec xi_;
  std::vector<Mat> a_;
  bool scalar_;
};

struct StageState {
  CellField N;
  CellField P;
  CellField R;  // div A(y, P)
  double residual;
  double energy;
};

StageState evaluate_state(const CellProblem& prob, CellField N, double mu) {
  CellField P = prob.corrected(N);
  CellField R = divergence(prob.flux(P, mu));
  const double r = lp_norm(R, 2.0);
  const double e = prob.energy(P, mu);
  return {std::move(N), std::move(P), std::move(R), r, e};
}

// Solve  -div(J grad x) = rhs  on the range with the FFT preconditioner.
std::vector<double> linear_solve(const CellProblem& prob, const std::vector<Mat>& J, const CellField& rhs,
                                 detail::SpectralSolver& spectral, double rel_tol, int max_iter) {
  const double cbar = std::max(prob.mean_trace(J), std::numeric_limits<double>::min());
  std::vector<double> x(prob.grid().size(), 0.0);
  detail::pcg([&](std::span<const double> in, std::span<double> out) { prob.apply_operator(J, in, out); },
              [&](std::span<const double> in, std::span<double> out) {
                spectral.apply_inverse_neg_laplacian(in, out, cbar);
              },
              rhs.values(), x, rel_tol, max_iter);
  return x;
}

CellField add_scaled(const CellField& N, const std::vector<double>& d, double t) {
  CellField out = N;
  auto v = out.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += t * d[k];
  return project_range(out);
}

[[noreturn]] void fail(const std::string& what, const StageState& best) {
  throw SolverError(what, best.residual, std::vector<double>(best.N.values().begin(), best.N.values().end()));
}

int newton_stage(const CellProblem& prob, StageState& st, double mu, double target, const CellSolveConfig& cfg,
                 detail::SpectralSolver& spectral, double scale) {
  int it = 0;
  while (st.residual > target) {
    if (it >= cfg.max_iter) fail("cell Newton iteration did not converge", st);
    ++it;
    const auto J = prob.jacobians(st.P, mu);
    const double lin_tol = std::clamp(0.1 * st.residual / scale, 1e-13, 1e-2);
    const auto d = linear_solve(prob, J, st.R, spectral, lin_tol, cfg.max_linear_iter);

    // Directional derivative of the energy along d is -<R, d>.
    double slope = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) slope -= st.R(0, k) * d[k];
    slope *= std::pow(prob.grid().spacing(), prob.grid().dim());

    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      StageState trial = evaluate_state(prob, add_scaled(st.N, d, t), mu);
      const double roundoff = 1e-13 * std::max(std::abs(st.energy), 1e-300);
      const bool armijo = trial.energy <= st.energy + 1e-4 * t * slope;
      const bool flat = std::abs(trial.energy - st.energy) <= roundoff && trial.residual < st.residual;
      if ((armijo && trial.energy <= st.energy) || flat) {
        st = std::move(trial);
        accepted = true;
        break;
      }
      t *= cfg.damping;
    }
    if (!accepted) fail("cell Newton line search stalled", st);
  }
  return it;
}

int picard_stage(const CellProblem& prob, StageState& st, double mu, double target, const CellSolveConfig& cfg,
                 detail::SpectralSolver& spectral, const Vec& xi, double p) {
  const auto& grid = prob.grid();
  int it = 0;
  // The secant underestimates the Jacobian by up to a factor p - 1.
  double omega = std::min(1.0, 1.0 / (p - 1.0));
  while (st.residual > target) {
    if (it >= cfg.max_iter) fail("cell Picard iteration did not converge", st);
    ++it;
    const auto S = prob.secants(st.P, mu);
    // -div(S grad N*) = div(S xi)
    CellField sx = CellField::vector(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Vec w = matvec(S[k], xi);
      for (int c = 0; c < grid.dim(); ++c) sx(c, k) = w[c];
    }
    const CellField rhs = divergence(sx);
    const auto nstar = linear_solve(prob, S, rhs, spectral, 1e-13, cfg.max_linear_iter);
    std::vector<double> d(nstar.size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = nstar[k] - st.N(0, k);

    bool accepted = false;
    while (omega > 1.0 / 1024.0) {
      StageState trial = evaluate_state(prob, add_scaled(st.N, d, omega), mu);
      if (trial.residual < st.residual) {
        st = std::move(trial);
        accepted = true;
        break;
      }
      omega *= 0.5;
    }
    if (!accepted) fail("cell Picard relaxation stalled", st);
  }
  return it;
}

void validate_schedule(const std::vector<double>& s) {
  if (s.empty()) throw PreconditionError("mu schedule is empty");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] >= 0.0) || !std::isfinite(s[i])) throw PreconditionError("mu schedule entries must be >= 0");
    if (i > 0 && !(s[i] < s[i - 1])) throw PreconditionError("mu schedule must be strictly decreasing");
  }
}

}  // namespace

std::vector<double> default_mu_schedule(double p) {
  if (p == 2.0) return {0.0};
  std::vector<double> s{1e-2, 1e-4, 1e-6, 1e-8};
  if (p >= 2.0) s.push_back(0.0);
  return s;
}

Corrector solve_cell(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid, const CellSolveConfig& cfg) {
  if (grid.dim() != model.dim()) throw PreconditionError("grid and model dimensions differ");
  if (!std::isfinite(xi[0]) || !std::isfinite(xi[1])) throw PreconditionError("xi must be finite");
  if (!(cfg.tol > 0.0)) throw PreconditionError("tol must be positive");
  const Vec x = grid.dim() == 1 ? Vec{xi[0], 0.0} : xi;
  const auto schedule = cfg.mu_schedule.empty() ? default_mu_schedule(model.p()) : cfg.mu_schedule;
  validate_schedule(schedule);
  if (model.p() < 2.0 && schedule.back() == 0.0 && cfg.strategy == Strategy::newton && !model.weight().is_constant())
    throw PreconditionError("final mu must be positive for p < 2");

  CellProblem prob(model, x, grid);
  const bool use_newton = cfg.strategy == Strategy::newton && prob.has_energy();
  const double scale = std::max(1.0, model.weight().upper() * std::pow(norm(x), model.p() - 1.0));

  Corrector out{x, CellField::scalar(grid), CellField::vector(grid), 0.0, 0.0, 0, schedule.back()};
  StageState st = evaluate_state(prob, CellField::scalar(grid), schedule.front());

  if (norm(x) > 0.0) {
    detail::SpectralSolver spectral(grid);
    for (std::size_t s = 0; s < schedule.size(); ++s) {
      const double mu = schedule[s];
      const bool last = s + 1 == schedule.size();
      if (s > 0) st = evaluate_state(prob, std::move(st.N), mu);
      const double target = (last ? cfg.tol : std::max(cfg.tol, cfg.stage_tol)) * scale;
      out.iterations += use_newton ? newton_stage(prob, st, mu, target, cfg, spectral, scale)
                                   : picard_stage(prob, st, mu, target, cfg, spectral, x, model.p());
    }
  } else {
    st = evaluate_state(prob, CellField::scalar(grid), schedule.back());
  }

  out.N = std::move(st.N);
  out.P = std::move(st.P);
  out.residual = st.residual;
  out.energy = st.energy;
  return out;
}

CellField corrector_flux(const FluxModel& model, const Corrector& corrector) {
  CellProblem prob(model, corrector.xi, corrector.N.grid());
  return prob.flux(corrector.P, corrector.mu);
}

CellField cell_residual(const FluxModel& model, const Corrector& corrector) {
  return divergence(corrector_flux(model, corrector));
}

Vec effective_flux(const FluxModel& model, const Corrector& corrector) {
  const auto m = mean(corrector_flux(model, corrector));
  return {m[0], m.size() > 1 ? m[1] : 0.0};
}

Vec effective_flux(const FluxModel& model, const Vec& xi, const PeriodicGrid& grid, const CellSolveConfig& cfg) {
  return effective_flux(model, solve_cell(model, xi, grid, cfg));
}

double effective_flux_1d_oracle(const FluxModel& model, int quad_points) {
  if (model.dim() != 1) throw PreconditionError("1D oracle requires d = 1");
  if (!model.weight().is_scalar()) throw PreconditionError("1D oracle requires a scalar weight");
  if (quad_points < 8) throw PreconditionError("quad_points must be >= 8");
  static constexpr double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
  static constexpr double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                   0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
  const int panels = std::max(1, quad_points / 8);
  const double h = 1.0 / panels;
  const double e = 1.0 / (1.0 - model.p());
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double mid = (i + 0.5) * h;
    double panel = 0.0;
    for (int q = 0; q < 8; ++q) panel += gw[q] * std::pow(model.weight().scalar({mid + 0.5 * h * gx[q], 0.0}), e);
    sum += 0.5 * h * panel;
  }
  return std::pow(sum, 1.0 - model.p());
}

CorrectorBounds corrector_bounds_check(const Corrector& corrector, double p) {
  CorrectorBounds b;
  const double nx = norm(corrector.xi);
  if (nx == 0.0) return b;
  const CellField g = gradient(corrector.N);
  b.n_lp = lp_norm(corrector.N, p) / nx;
  b.grad_lp = lp_norm(g, p) / nx;
  b.grad_sup = sup_norm(g) / nx;
  b.finite = std::isfinite(b.n_lp) && std::isfinite(b.grad_lp) && std::isfinite(b.grad_sup);
  return b;
}

std::vector<std::pair<Vec, double>> holder_pairs(const Vec& base, int dim, int samples) {
  if (samples < 2) throw PreconditionError("need at least two pair samples");
  std::vector<std::pair<Vec, double>> out;
  for (int s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s) / (samples - 1);
    const double dist = std::pow(10.0, -1.0 - 3.0 * t);
    if (dim == 1) {
      out.push_back({{base[0] * (1.0 + dist), 0.0}, dist});
    } else {
      const double phi = 2.0 * std::asin(0.5 * dist);
      const double c = std::cos(phi), sn = std::sin(phi);
      out.push_back({{c * base[0] - sn * base[1], sn * base[0] + c * base[1]}, dist});
    }
  }
  return out;
}

HolderFit holder_in_xi(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg,
                       int pair_samples) {
  const Vec base = model.dim() == 1 ? Vec{1.0, 0.0} : Vec{std::cos(0.3), std::sin(0.3)};
  const Corrector c0 = solve_cell(model, base, grid, cfg);
  HolderFit out;
  for (const auto& [xi2, dist] : holder_pairs(base, model.dim(), pair_samples)) {
    const Corrector c1 = solve_cell(model, xi2, grid, cfg);
    out.distances.push_back(dist);
    out.differences.push_back(lp_norm(c1.P - c0.P, model.p()));
  }
  out.fit = fit_loglog(out.distances, out.differences);
  return out;
}

double linearity_check_p2(const FluxModel& model, const PeriodicGrid& grid, const CellSolveConfig& cfg) {
  if (model.p() != 2.0) throw PreconditionError("linearity check requires p = 2");
  auto rel = [](const CellField& a, const CellField& b) {
    const double den = lp_norm(a, 2.0);
    const double num = lp_norm(a - b, 2.0);
    return den > 0.0 ? num / den : num;
  };
  const Vec e1{1.0, 0.0};
  const Corrector n1 = solve_cell(model, e1, grid, cfg);
  const Corrector n2e1 = solve_cell(model, 2.0 * e1, grid, cfg);
  double defect = rel(n2e1.N, 2.0 * n1.N);
  if (model.dim() == 2) {
    const Corrector n2 = solve_cell(model, {0.0, 1.0}, grid, cfg);
    const Corrector n12 = solve_cell(model, {1.0, 1.0}, grid, cfg);
    defect = std::max(defect, rel(n12.N, n1.N + n2.N));
  }
  return defect;
}

}  // namespace homog
