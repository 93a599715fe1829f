#include "homog/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "homog/direction_table.hpp"
#include "homog/parallel.hpp"
#include "homog/seeding.hpp"
#include "homog/two_scale.hpp"

namespace homog {

namespace {

std::optional<LogLogFit> fit_column(const std::vector<double>& eps, const std::vector<double>& values, double floor) {
  if (values.size() < 3) return std::nullopt;
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v <= floor; })) return std::nullopt;
  try {
    return fit_loglog(eps, values, 3);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

bool satisfies_diagonal_shift(const WeightSpec& w) {
  return std::holds_alternative<ConstantWeight>(w) || std::holds_alternative<DiagonalShiftWeight>(w);
}

}  // namespace

RateTable convergence_sweep(const ExperimentConfig& cfg) {
  const FluxModel model = build_model(cfg);
  const PeriodicGrid grid(cfg.dim, cfg.cell_n);
  const DirectionTable table(model, grid, cell_config(cfg), cfg.n_dir, cfg.threads);
  const auto op = table.effective_operator();
  const DomainMesh mesh(cfg.dim, mesh_size(cfg));
  const auto g = cfg.boundary.function(cfg.dim);
  const auto F = cfg.forcing.function(cfg.dim);
  const DomainSolveConfig dcfg = domain_config(cfg);
  const TwoScaleOptions opt = two_scale_options(cfg);

  RateTable out;
  out.dim = cfg.dim;
  out.p = cfg.p;
  out.tau = cfg.tau ? *cfg.tau : admissible_tau(cfg.p, cfg.delta, cfg.theta).default_tau;
  out.table_residual = table.max_residual();
  out.config_hash = config_hash(cfg);
  out.seed = cfg.seed;

  const std::vector<double> eps = eps_list(cfg);
  out.eval_depth = cfg.eval_set == EvalSet::max_eps ? *std::max_element(eps.begin(), eps.end()) : 0.0;

  const Solution u0 = solve_homogenized(*op, mesh, g, F, dcfg);
  out.u0_residual = u0.residual;

  std::vector<std::optional<RateRow>> rows(eps.size());
  std::vector<std::string> errors(eps.size());
  parallel_for(eps.size(), cfg.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Solution ue = solve_oscillating(model, eps[i], mesh, g, F, dcfg);
      const ApproxField V = build_first_order_gradient(table, u0, eps[i], out.tau, opt);
      const double depth = out.eval_depth > 0.0 ? out.eval_depth : eps[i];
      RateRow r;
      r.k = cfg.k[i];
      r.eps = eps[i];
      r.h = V.h;
      r.tau = out.tau;
      r.err_u = error_solution_norm(ue, u0, cfg.p);
      r.err_grad = error_gradient_norm(ue, V, cfg.p, depth);
      r.err_grad_sigma_eps = error_gradient_norm(ue, V, cfg.p, eps[i]);
      r.err_grad_no_corrector = lp_norm(ue.grad_u - u0.grad_u, cfg.p, colayer_mask(mesh, depth));
      r.iterations = ue.iterations;
      r.residual = ue.residual;
      r.warnings = V.warnings;
      if (cfg.record_runtime)
        r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows[i] = std::move(r);
    } catch (const SolverError& e) {
      errors[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i]) {
      out.rows.push_back(std::move(*rows[i]));
    } else if (!out.partial) {
      out.partial = true;
      out.failure = "k=" + std::to_string(cfg.k[i]) + ": " + errors[i];
    }
  }

  std::vector<double> e, eu, eg;
  for (const auto& r : out.rows) {
    e.push_back(r.eps);
    eu.push_back(r.err_u);
    eg.push_back(r.err_grad);
  }
  const double floor = 1e3 * cfg.domain_tol;
  out.fit_u = fit_column(e, eu, floor);
  out.fit_grad = fit_column(e, eg, floor);
  return out;
}

EffectiveStructure sample_effective_structure(const EffectiveOperator& op, int samples, std::uint64_t seed) {
  auto rng = make_rng(seed, "effective_structure");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double p = op.p();
  const int d = op.dim();
  EffectiveStructure s;
  s.mu0 = s.coercivity = std::numeric_limits<double>::infinity();
  const double hexp = (p - 1.0) / (3.0 - p);
  const double sexp = (p - 1.0) * (2.0 - p) / (3.0 - p);
  for (int i = 0; i < samples; ++i) {
    Vec xi{u(rng), 0.0}, xj{u(rng), 0.0};
    if (d == 2) {
      xi[1] = u(rng);
      xj[1] = u(rng);
    }
    ++s.samples;
    const Vec dx = xi - xj;
    const double dn = norm(dx);
    const double sum = norm(xi) + norm(xj);
    if (dn == 0.0 || sum == 0.0) {
      ++s.skipped;
      continue;
    }
    const Vec dA = op.flux(xi) - op.flux(xj);
    const double inner = dot(dA, dx);
    if (!(inner > 0.0)) ++s.violations;
    const double w = std::pow(sum, p - 2.0);
    const double ratio = inner / (w * dn * dn);
    s.mu0 = std::min(s.mu0, ratio);
    s.mu1 = std::max(s.mu1, ratio);
    if (p >= 2.0) {
      s.coercivity = std::min(s.coercivity, inner / std::pow(dn, p));
      s.lipschitz = std::max(s.lipschitz, norm(dA) / (dn * w));
    }
    if (p <= 2.0) s.holder = std::max(s.holder, norm(dA) / (std::pow(dn, hexp) * std::pow(sum, sexp)));
  }
  if (s.samples == s.skipped) s.mu0 = 0.0;
  if (!(p >= 2.0) || s.samples == s.skipped) s.coercivity = 0.0;
  return s;
}

StructureReport structure_verify(const ExperimentConfig& cfg) {
  const FluxModel model = build_model(cfg);
  StructureReport rep;
  rep.homogeneity = check_homogeneity(model, cfg.samples, derive_seed(cfg.seed, "homogeneity"));
  const std::uint64_t sw_seed = derive_seed(cfg.seed, "sandwich");
  rep.sandwich = check_monotonicity_growth(model, cfg.samples, sw_seed);
  rep.unit_sandwich =
      check_monotonicity_growth(FluxModel(cfg.dim, cfg.p, Weight::constant(cfg.dim, 1.0), cfg.mu_reg), cfg.samples, sw_seed);
  rep.weight_lower = model.weight().lower();
  rep.weight_upper = model.weight().upper();
  rep.sandwich_in_bounds = rep.sandwich.violations == 0 && rep.sandwich.mu0 > 0.0 &&
                           rep.sandwich.mu0 >= 0.95 * rep.weight_lower * rep.unit_sandwich.mu0 &&
                           rep.sandwich.mu1 <= 1.05 * rep.weight_upper * rep.unit_sandwich.mu1;
  rep.lipschitz = check_lipschitz_in_y(model, cfg.samples, derive_seed(cfg.seed, "lipschitz"));

  const PeriodicGrid grid(cfg.dim, cfg.cell_n);
  const DirectionTable table(model, grid, cell_config(cfg), cfg.n_dir, cfg.threads);
  rep.table_residual = table.max_residual();
  rep.effective = sample_effective_structure(*table.effective_operator(), cfg.samples, derive_seed(cfg.seed, "effective"));
  return rep;
}

Section5Report section5_example(const ExperimentConfig& cfg) {
  const FluxModel model = build_model(cfg);
  const PeriodicGrid grid(cfg.dim, cfg.cell_n);
  const CellSolveConfig ccfg = cell_config(cfg);
  Section5Report rep;
  rep.dim = cfg.dim;
  rep.p = cfg.p;

  if (cfg.dim == 1) {
    rep.a_numeric = effective_flux(model, {1.0, 0.0}, grid, ccfg)[0];
    rep.a_oracle = effective_flux_1d_oracle(model);
    rep.relative_error = std::abs(rep.a_numeric - rep.a_oracle) / rep.a_oracle;
    return rep;
  }

  if (!satisfies_diagonal_shift(cfg.weight))
    throw PreconditionError("the ansatz needs a weight with equal partial derivatives (constant or diagonal shift)");

  const Corrector chi = solve_cell(model, {1.0, 1.0}, grid, ccfg);
  rep.chi_residual = chi.residual;
  rep.a_hat = effective_flux(model, chi);
  rep.a_hat_sum = rep.a_hat[0] + rep.a_hat[1];

  for (const Vec& xi : cfg.ansatz_xi) {
    AnsatzCase c;
    c.xi = xi;
    const double s = xi[0] + xi[1];
    // grad of the ansatz plus xi is s (grad chi + 1); chi.P holds grad chi + 1.
    Corrector ansatz = chi;
    ansatz.xi = {s, s};
    ansatz.N *= s;
    ansatz.P *= s;
    c.ansatz_residual = lp_norm(cell_residual(model, ansatz), 2.0);
    c.mean_defect = norm(Vec{s, s} - xi);
    const Corrector direct = solve_cell(model, xi, grid, ccfg);
    c.direct_residual = direct.residual;
    c.flux_difference = norm(effective_flux(model, ansatz) - effective_flux(model, direct));
    c.within_bound = c.ansatz_residual <= 10.0 * std::max(c.direct_residual, cfg.cell_tol);
    rep.cases.push_back(c);
  }
  return rep;
}

LargeScaleReport large_scale_experiment(const ExperimentConfig& cfg) {
  const FluxModel model = build_model(cfg);
  const DomainMesh mesh(cfg.dim, mesh_size(cfg));
  const auto g = cfg.boundary.function(cfg.dim);
  const auto F = cfg.forcing.function(cfg.dim);
  const DomainSolveConfig dcfg = domain_config(cfg);
  const std::vector<double> eps = eps_list(cfg);

  std::vector<LargeScaleRow> rows(eps.size());
  parallel_for(eps.size(), cfg.threads, [&](std::size_t i) {
    const auto radii = geometric_radii(cfg.r_max, cfg.r_min_factor * eps[i], cfg.radius_ratio);
    const Solution u = solve_oscillating(model, eps[i], mesh, g, F, dcfg);
    rows[i] = {eps[i], u.residual, large_scale_decay(u, cfg.center, radii, cfg.p)};
  });

  LargeScaleReport rep;
  rep.worst_slope = std::numeric_limits<double>::infinity();
  for (auto& r : rows) {
    rep.worst_slope = std::min(rep.worst_slope, r.decay.fit.slope);
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

}  // namespace homog
