#pragma once

// Experiment drivers behind the command-line tool. Each returns a plain report
// struct; serialization lives in report.hpp.

#include <optional>
#include <string>
#include <vector>

#include "homog/diagnostics.hpp"
#include "homog/experiment_config.hpp"
#include "homog/flux_model.hpp"
#include "homog/rate_fit.hpp"

namespace homog {

struct RateRow {
  int k = 0;
  double eps = 0.0;
  double h = 0.0;
  double tau = 0.0;
  double err_u = 0.0;
  double err_grad = 0.0;        ///< on the configured evaluation set
  double err_grad_sigma_eps = 0.0;  ///< on Sigma_eps of this row
  double err_grad_no_corrector = 0.0;  ///< grad u_eps - grad u0 on the configured set
  double runtime_s = 0.0;       ///< 0 unless record_runtime
  int iterations = 0;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

struct RateTable {
  int dim = 1;
  double p = 2.0;
  double tau = 0.0;
  double eval_depth = 0.0;  ///< 0 when each row uses its own Sigma_eps
  double u0_residual = 0.0;
  double table_residual = 0.0;
  std::vector<RateRow> rows;  ///< increasing k
  std::optional<LogLogFit> fit_u;
  std::optional<LogLogFit> fit_grad;
  bool partial = false;
  std::string failure;
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// Solves the homogenized problem once and the oscillating problem for every
/// eps, builds V and records both error norms. Slopes are fitted only with at
/// least three rows and skipped for a column whose values all sit below
/// 1e3 * domain_tol (noise floor). A failing solve leaves its row out and
/// flags the table as partial.
RateTable convergence_sweep(const ExperimentConfig& cfg);

struct EffectiveStructure {
  double mu0 = 0.0;  ///< min <dA, dxi> / ((|xi|+|xi'|)^(p-2) |dxi|^2)
  double mu1 = 0.0;  ///< max of the same ratio
  double coercivity = 0.0;  ///< p >= 2: min <dA, dxi> / |dxi|^p
  double lipschitz = 0.0;   ///< p >= 2: max |dA| / (|dxi| (|xi|+|xi'|)^(p-2))
  double holder = 0.0;      ///< p <= 2: max |dA| / (|dxi|^((p-1)/(3-p)) (|xi|+|xi'|)^((p-1)(2-p)/(3-p)))
  int violations = 0;       ///< samples with <dA, dxi> <= 0
  int samples = 0;
  int skipped = 0;
};

struct StructureReport {
  HomogeneityReport homogeneity;
  SandwichReport sandwich;
  SandwichReport unit_sandwich;  ///< same samples with a unit weight
  double weight_lower = 0.0;
  double weight_upper = 0.0;
  /// sandwich constants inside [0.95 a_min rho0, 1.05 a_max rho1], rho from unit_sandwich
  bool sandwich_in_bounds = false;
  LipschitzReport lipschitz;
  EffectiveStructure effective;
  double table_residual = 0.0;
};

/// Samples the model assumptions and the structure of the effective operator
/// (evaluated through the direction table) with seeded streams.
StructureReport structure_verify(const ExperimentConfig& cfg);

/// Samples <A(xi)-A(xi'), xi-xi'> and |A(xi)-A(xi')| for xi, xi' with
/// components uniform in [-1, 1].
EffectiveStructure sample_effective_structure(const EffectiveOperator& op, int samples, std::uint64_t seed);

struct AnsatzCase {
  Vec xi{0.0, 0.0};
  double ansatz_residual = 0.0;  ///< ||div A(y, (sum xi)(grad chi + 1))||_2
  double direct_residual = 0.0;  ///< residual of solve_cell at xi
  double mean_defect = 0.0;      ///< |(sum xi) 1 - xi|, zero only for xi parallel to 1
  double flux_difference = 0.0;  ///< |ansatz flux average - direct effective flux|
  bool within_bound = false;     ///< ansatz <= 10 max(direct, cell tol)
};

struct Section5Report {
  int dim = 1;
  double p = 2.0;
  // d = 1
  double a_numeric = 0.0;
  double a_oracle = 0.0;
  double relative_error = 0.0;
  // d = 2
  Vec a_hat{0.0, 0.0};
  double a_hat_sum = 0.0;
  double chi_residual = 0.0;
  std::vector<AnsatzCase> cases;
};

/// d = 1: effective coefficient against the quadrature oracle. d = 2: solves
/// the chi problem (the cell problem at xi = (1, 1)), builds the ansatz
/// N(y, xi) = (chi + y1 + y2)(xi1 + xi2) - y.xi and measures its cell residual.
/// Throws PreconditionError in 2D unless the weight is constant or a diagonal shift.
Section5Report section5_example(const ExperimentConfig& cfg);

struct LargeScaleRow {
  double eps = 0.0;
  double residual = 0.0;
  DecayReport decay;
};

struct LargeScaleReport {
  std::vector<LargeScaleRow> rows;
  double worst_slope = 0.0;
};

/// For each eps solves the oscillating problem and fits r -> int_{B_r} |grad u|^p
/// over radii from r_max down to r_min_factor * eps.
LargeScaleReport large_scale_experiment(const ExperimentConfig& cfg);

}  // namespace homog
