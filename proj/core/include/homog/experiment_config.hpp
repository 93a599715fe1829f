#pragma once

// Declarative experiment configuration: one JSON document with every knob of
// the harness. Missing keys take defaults, unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homog/cell_solver.hpp"
#include "homog/domain_mesh.hpp"
#include "homog/domain_solver.hpp"
#include "homog/flux_model.hpp"
#include "homog/two_scale.hpp"

namespace homog {

enum class ReportFormat { csv, json };

/// Which co-layer the gradient error is measured on.
enum class EvalSet {
  max_eps,  ///< Sigma_r with r the largest eps of the sweep, shared by every row
  eps,      ///< Sigma_eps of each row
};

struct ExperimentConfig {
  // model
  int dim = 1;
  double p = 2.0;
  double mu_reg = 0.0;
  WeightSpec weight = LayeredWeight{Profile{2.0, {{1.0, 1, 0.0}}}};

  // grids: eps = 2^-k, mesh n = mesh_m * 2^max(k)
  int cell_n = 256;
  int mesh_m = 16;
  std::vector<int> k = {3, 4, 5};

  // problem data
  Preset boundary = Preset::zero();
  Preset forcing = Preset::constant(1.0);

  // two-scale knobs; tau unset means the admissible default
  std::optional<double> tau;
  double theta = 0.5;
  double delta = 0.1;
  double vartheta = 0.5;
  int n_dir = 64;
  EvalSet eval_set = EvalSet::max_eps;

  // solvers
  double cell_tol = 1e-9;
  int cell_max_iter = 200;
  double domain_tol = 1e-9;
  int domain_max_iter = 100;
  std::vector<double> mu_schedule;  ///< empty: default for p
  Strategy strategy = Strategy::newton;

  // structure sampling
  int samples = 10000;

  // ansatz directions for the closed-form examples
  std::vector<Vec> ansatz_xi = {{1.0, 1.0}, {1.0, 0.5}, {0.3, -0.8}};

  // large-scale decay
  Vec center{0.5, 0.5};
  double r_max = 0.25;
  double r_min_factor = 2.0;  ///< smallest radius = factor * eps
  double radius_ratio = 1.4142135623730951;

  // output; dir, format and threads do not enter the hash
  std::string out_dir = "out";
  ReportFormat format = ReportFormat::csv;
  bool record_runtime = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully populated document; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// SHA-256 (hex) of the canonical dump without out_dir, format and threads.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json weight_to_json(const WeightSpec& w);
WeightSpec weight_from_json(const nlohmann::json& j);
nlohmann::json preset_to_json(const Preset& p);
Preset preset_from_json(const nlohmann::json& j);

FluxModel build_model(const ExperimentConfig& cfg);
CellSolveConfig cell_config(const ExperimentConfig& cfg);
DomainSolveConfig domain_config(const ExperimentConfig& cfg);
TwoScaleOptions two_scale_options(const ExperimentConfig& cfg);
/// 2^-k in the order of cfg.k.
std::vector<double> eps_list(const ExperimentConfig& cfg);
int mesh_size(const ExperimentConfig& cfg);

}  // namespace homog
