// homog: command-line front end for the experiment drivers.
//
// Exit codes: 0 success, 1 solver failure, 2 configuration or usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "homog/cell_solver.hpp"
#include "homog/direction_table.hpp"
#include "homog/experiment_config.hpp"
#include "homog/experiments.hpp"
#include "homog/flux_corrector.hpp"
#include "homog/report.hpp"

namespace {

using json = nlohmann::json;
using namespace homog;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<int> threads;
};

ExperimentConfig resolve(const Globals& g) {
  ExperimentConfig cfg = g.config.empty() ? parse_config(json::object()) : load_config(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.out_dir = g.out;
  if (g.format == "csv") {
    cfg.format = ReportFormat::csv;
  } else if (g.format == "json") {
    cfg.format = ReportFormat::json;
  } else if (!g.format.empty()) {
    throw ConfigError("--format: expected csv or json");
  }
  if (g.threads) {
    if (*g.threads < 1) throw ConfigError("--threads: must be positive");
    cfg.threads = *g.threads;
  }
  return cfg;
}

Vec parse_xi(const std::string& text, int dim) {
  std::stringstream ss(text);
  std::string part;
  std::vector<double> v;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("--xi: cannot parse '" + text + "'");
    }
  }
  if (static_cast<int>(v.size()) != dim) throw ConfigError("--xi: expected " + std::to_string(dim) + " components");
  return {v[0], dim == 2 ? v[1] : 0.0};
}

json vec_json(const Vec& v, int dim) { return dim == 1 ? json::array({v[0]}) : json::array({v[0], v[1]}); }

void emit(const json& doc, const ExperimentConfig& cfg, const std::string& stem) {
  const auto path = write_json(doc, std::filesystem::path(cfg.out_dir) / (stem + ".json"));
  std::cout << path.string() << "\n";
}

int run_cell(const ExperimentConfig& cfg, const std::string& xi_text) {
  const FluxModel model = build_model(cfg);
  const PeriodicGrid grid(cfg.dim, cfg.cell_n);
  const Vec xi = parse_xi(xi_text, cfg.dim);
  const Corrector c = solve_cell(model, xi, grid, cell_config(cfg));
  const CorrectorBounds b = corrector_bounds_check(c, cfg.p);
  json r = {{"xi", vec_json(xi, cfg.dim)},
            {"residual", c.residual},
            {"iterations", c.iterations},
            {"mu", c.mu},
            {"effective_flux", vec_json(effective_flux(model, c), cfg.dim)},
            {"bounds", {{"n_lp", b.n_lp}, {"grad_lp", b.grad_lp}, {"grad_sup", b.grad_sup}, {"finite", b.finite}}}};
  if (std::isfinite(c.energy)) r["energy"] = c.energy;
  emit(with_metadata(r, cfg, "cell"), cfg, "cell");
  return 0;
}

int run_effective(const ExperimentConfig& cfg, const std::vector<std::string>& xis) {
  const FluxModel model = build_model(cfg);
  const PeriodicGrid grid(cfg.dim, cfg.cell_n);
  json rows = json::array();
  for (const auto& t : xis) {
    const Vec xi = parse_xi(t, cfg.dim);
    rows.push_back({{"xi", vec_json(xi, cfg.dim)},
                    {"effective_flux", vec_json(effective_flux(model, xi, grid, cell_config(cfg)), cfg.dim)}});
  }
  json r = {{"values", rows}};
  if (cfg.dim == 1 && model.weight().is_scalar()) r["oracle_coefficient"] = effective_flux_1d_oracle(model);
  emit(with_metadata(r, cfg, "effective"), cfg, "effective");
  return 0;
}

int run_fluxcorr(const ExperimentConfig& cfg, const std::string& xi_text) {
  const FluxModel model = build_model(cfg);
  const PeriodicGrid grid(cfg.dim, cfg.cell_n);
  const Vec xi = parse_xi(xi_text, cfg.dim);
  const Corrector c = solve_cell(model, xi, grid, cell_config(cfg));
  const CellField b = oscillation_flux(model, c, effective_flux(model, c));
  const FluxCorrectorSet set = build_flux_corrector(b, xi);
  const FluxCorrectorReport rep = validate_flux_corrector(set, b, cfg.cell_tol);
  json r = {{"xi", vec_json(xi, cfg.dim)},
            {"r1", rep.r1},
            {"r2", rep.r2},
            {"antisymmetry_defect", rep.antisymmetry_defect},
            {"mean_b", rep.mean_b},
            {"alternating_b", rep.alternating_b},
            {"success", rep.success}};
  emit(with_metadata(r, cfg, "fluxcorr"), cfg, "fluxcorr");
  return rep.success ? 0 : 1;
}

int run_solve(const ExperimentConfig& cfg, const std::string& which, std::optional<int> k) {
  const FluxModel model = build_model(cfg);
  const DomainMesh mesh(cfg.dim, mesh_size(cfg));
  const auto g = cfg.boundary.function(cfg.dim);
  const auto F = cfg.forcing.function(cfg.dim);
  Solution s = [&] {
    if (which == "homogenized") {
      const DirectionTable table(model, PeriodicGrid(cfg.dim, cfg.cell_n), cell_config(cfg), cfg.n_dir, cfg.threads);
      return solve_homogenized(*table.effective_operator(), mesh, g, F, domain_config(cfg));
    }
    const int kk = k ? *k : cfg.k.back();
    if (kk < 1 || (mesh.n() >> kk) << kk != mesh.n()) throw ConfigError("--k: eps = 2^-k must divide the mesh");
    return solve_oscillating(model, std::ldexp(1.0, -kk), mesh, g, F, domain_config(cfg));
  }();
  const std::filesystem::path dir(cfg.out_dir);
  const std::string stem = "solve_" + which;
  write_csv(s.u, dir / (stem + "_u.csv"));
  json r = {{"which", which},
            {"eps", s.eps},
            {"mesh_n", mesh.n()},
            {"residual", s.residual},
            {"residual_floor", s.residual_floor},
            {"newton_iterations", s.iterations},
            {"grad_lp", lp_norm(s.grad_u, cfg.p)}};
  emit(with_metadata(r, cfg, "solve"), cfg, stem);
  return 0;
}

int run_sweep(const ExperimentConfig& cfg) {
  const RateTable t = convergence_sweep(cfg);
  const auto path = emit_report(t, cfg.format, cfg.out_dir);
  std::cout << path.string() << "\n";
  if (t.partial) {
    std::cerr << "sweep incomplete: " << t.failure << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic homogenization of weighted p-Laplace problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", homog::version());

  Globals g;
  app.add_option("--config", g.config, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Root seed for samplers");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Report format: csv or json");
  app.add_option("--threads", g.threads, "Worker threads");

  std::string xi = "1";
  std::vector<std::string> xis;
  std::string which = "oscillating";
  std::optional<int> k;

  auto* cell = app.add_subcommand("cell", "Solve one cell corrector");
  cell->add_option("--xi", xi, "Macroscopic gradient, comma separated");
  auto* eff = app.add_subcommand("effective", "Effective flux for a list of gradients");
  eff->add_option("--xi", xis, "Macroscopic gradient, comma separated (repeatable)")->required();
  auto* flux = app.add_subcommand("fluxcorr", "Build and validate the flux corrector");
  flux->add_option("--xi", xi, "Macroscopic gradient, comma separated");
  auto* solve = app.add_subcommand("solve", "Solve the oscillating or homogenized Dirichlet problem");
  solve->add_option("--which", which, "oscillating or homogenized")
      ->check(CLI::IsMember({"oscillating", "homogenized"}));
  solve->add_option("--k", k, "eps = 2^-k (default: the largest k of the config)");
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over eps");
  auto* verify = app.add_subcommand("verify", "Sample structural assumptions");
  auto* sec5 = app.add_subcommand("section5", "Closed-form and ansatz examples");
  auto* large = app.add_subcommand("largescale", "Large-scale gradient decay");

  // Options given after the subcommand name are accepted too.
  for (auto* sub : {cell, eff, flux, solve, sweep, verify, sec5, large}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ExperimentConfig cfg = resolve(g);
    if (*cell) return run_cell(cfg, xi);
    if (*eff) return run_effective(cfg, xis);
    if (*flux) return run_fluxcorr(cfg, xi);
    if (*solve) return run_solve(cfg, which, k);
    if (*sweep) return run_sweep(cfg);
    if (*verify) {
      emit(with_metadata(to_json(structure_verify(cfg)), cfg, "verify"), cfg, "verify");
      return 0;
    }
    if (*sec5) {
      emit(with_metadata(to_json(section5_example(cfg)), cfg, "section5"), cfg, "section5");
      return 0;
    }
    if (*large) {
      emit(with_metadata(to_json(large_scale_experiment(cfg)), cfg, "largescale"), cfg, "largescale");
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
