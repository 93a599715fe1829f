// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 only
// when every selected criterion passes.
//
//   homog_acceptance [--cli PATH] [--work DIR] [--only N[,N...]]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "homog/experiments.hpp"
#include "homog/flux_corrector.hpp"
#include "homog/report.hpp"
#include "homog/seeding.hpp"

namespace {

using namespace homog;
using json = nlohmann::json;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kOracleTol = 1e-3;
constexpr double kOracleTolLinear = 1e-4;
constexpr double kOracleSeconds = 10.0;
constexpr double kDegenerateTol = 1e-10;
constexpr double kHomogeneityTol = 1e-8;
constexpr double kFluxCorrectorR1 = 1e-6;
constexpr double kMeanB = 1e-8;
constexpr double kYoungSlack = 1e-12;
constexpr double kAffineTol = 1e-12;
constexpr double kSmoothingSpread = 2.0;
constexpr double kLinearSlope = 0.9;
constexpr double kLinearSeconds = 120.0;
constexpr double kNonlinearSlope = 0.2;
constexpr double kHolderMargin = 0.15;
constexpr double kAnsatzFactor = 10.0;
constexpr double kAnsatzSum = 0.1;
constexpr double kDecaySlope = 1.5;
constexpr double kDecaySeconds = 300.0;
constexpr double kSandwichBand = 0.05;
constexpr int kStructureSamples = 10000;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

struct Options {
  std::string cli;
  fs::path work = "acceptance_work";
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

json trig1d_weight() {
  return {{"type", "trig"}, {"base", 2.0}, {"modes", {{{"amplitude", 1.0}, {"k", {1, 0}}, {"phase", 0.0}}}}};
}
json profile_weight(const char* type) {
  return {{"type", type}, {"base", 2.0}, {"modes", {{{"amplitude", 1.0}, {"k", 1}, {"phase", 0.0}}}}};
}
Weight trig1d() { return Weight(TrigWeight{2.0, {{1.0, {1, 0}, 0.0}}}, 1); }
Weight layered2d() { return Weight(LayeredWeight{Profile{2.0, {{1.0, 1, 0.0}}}}, 2); }

// (int_0^1 (2 + sin 2 pi y)^(1/(1-p)) dy)^(1-p), composite Simpson.
double harmonic_oracle(double p) {
  const int n = 400000;
  const double h = 1.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(2.0 + std::sin(2 * kPi * i * h), 1.0 / (1.0 - p));
  }
  return std::pow(s * h / 3.0, 1.0 - p);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

double field_diff(const NodalField& a, const NodalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

// 1. 1D effective coefficient against an independent quadrature.
void effective_coefficient(Outcome& o, const Options&) {
  const PeriodicGrid grid(1, 512);
  for (double p : {1.5, 2.0, 3.0}) {
    const FluxModel m(1, p, trig1d());
    const auto t0 = std::chrono::steady_clock::now();
    const double a = effective_flux(m, {1.0, 0.0}, grid)[0];
    const double dt = seconds_since(t0);
    const double oracle = p == 2.0 ? std::sqrt(3.0) : harmonic_oracle(p);
    const double rel = std::abs(a - oracle) / oracle;
    o.detail << "p=" << p << " rel=" << sci(rel) << " t=" << sci(dt) << "s; ";
    o.check(rel <= (p == 2.0 ? kOracleTolLinear : kOracleTol), "accuracy at p=" + sci(p));
    o.check(dt <= kOracleSeconds, "runtime at p=" + sci(p));
  }
}

// 2. Constant weight: no corrector, no oscillation, isotropic law, V = grad u0.
void constant_coefficient(Outcome& o, const Options&) {
  const double c = 2.0;
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const FluxModel m(2, p, Weight::constant(2, c));
    const PeriodicGrid grid(2, 32);
    const Vec xi{0.6, -0.8};
    const Corrector corr = solve_cell(m, xi, grid);
    const Vec ahat = effective_flux(m, corr);
    const CellField b = oscillation_flux(m, corr, ahat);
    const FluxCorrectorSet set = build_flux_corrector(b, xi);
    const double law = norm(ahat - (c * std::pow(norm(xi), p - 2)) * xi);
    worst = std::max({worst, sup_norm(corr.N), sup_norm(b), sup_norm(set.E_matrix()), law});

    for (int dim : {1, 2}) {
      const FluxModel md(dim, p, Weight::constant(dim, c));
      const DirectionTable table(md, PeriodicGrid(dim, 32), {}, 16);
      const DomainMesh mesh(dim, dim == 1 ? 256 : 64);
      const auto g = Preset::sine_product(0.5, {1.0, 1.0}, {0.3, 0.3}).function(dim);
      const Solution u0 = solve_homogenized(*table.effective_operator(), mesh, g, [](const Vec&) { return 1.0; });
      const ApproxField V = build_first_order_gradient(table, u0, 0.0625, 1.5);
      worst = std::max(worst, field_diff(V.V, u0.grad_u));
    }
  }
  o.detail << "max deviation " << sci(worst) << " over p in {1.5,2,3,4}";
  o.check(worst <= kDegenerateTol, "degeneracy");
}

// 3. Scaling of flux, corrector, effective flux and flux corrector.
void homogeneity(Outcome& o, const Options&) {
  CellSolveConfig cfg;
  cfg.tol = 1e-12;
  const PeriodicGrid grid(2, 32);
  double flux = 0.0, corr = 0.0, eff = 0.0, fc = 0.0;
  for (double p : {1.5, 3.0}) {
    const FluxModel m(2, p, layered2d());
    flux = std::max(flux, check_homogeneity(m, 2000, derive_seed(0, "acceptance"), {0.5, 2.0, 10.0}).max_defect);
    const Vec xi{0.6, 0.8};
    const Corrector c1 = solve_cell(m, xi, grid, cfg);
    const Vec a1 = effective_flux(m, c1);
    const FluxCorrectorSet e1 = build_flux_corrector(oscillation_flux(m, c1, a1), xi);
    for (double t : {0.5, 2.0, 10.0}) {
      const Corrector ct = solve_cell(m, t * xi, grid, cfg);
      const Vec at = effective_flux(m, ct);
      const FluxCorrectorSet et = build_flux_corrector(oscillation_flux(m, ct, at), t * xi);
      const double s = std::pow(t, p - 1);
      corr = std::max(corr, lp_norm(ct.N - t * c1.N, 2.0) / lp_norm(t * c1.N, 2.0));
      eff = std::max(eff, norm(at - s * a1) / norm(s * a1));
      const CellField Et = et.E_matrix();
      fc = std::max(fc, lp_norm(Et - s * e1.E_matrix(), 2.0) / lp_norm(Et, 2.0));
    }
  }
  o.detail << "flux " << sci(flux) << ", corrector " << sci(corr) << ", effective " << sci(eff) << ", flux corrector "
           << sci(fc);
  o.check(std::max({flux, corr, eff, fc}) <= kHomogeneityTol, "scaling defect");
}

// 4. Flux-corrector identities on the 2D layered benchmark at default tolerances.
void flux_corrector(Outcome& o, const Options&) {
  for (double p : {2.0, 3.0}) {
    const FluxModel m(2, p, layered2d());
    const Corrector c = solve_cell(m, {0.6, 0.8}, PeriodicGrid(2, 64));
    const CellField b = oscillation_flux(m, c, effective_flux(m, c));
    const FluxCorrectorReport r = validate_flux_corrector(build_flux_corrector(b, c.xi), b);
    o.detail << "p=" << p << " antisym=" << r.antisymmetry_defect << " r1=" << sci(r.r1) << " |mean b|=" << sci(r.mean_b)
             << "; ";
    o.check(r.antisymmetry_defect == 0.0, "antisymmetry");
    o.check(r.r1 <= kFluxCorrectorR1, "divergence identity");
    o.check(r.mean_b <= kMeanB, "mean of b");
  }
}

// 5. Smoothing operator: Young bound, affine invariance, approximation constant.
void smoothing(Outcome& o, const Options&) {
  const DomainMesh mesh(2, 256);
  std::mt19937_64 rng(derive_seed(0, "young"));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NodalField f(mesh, 1);
  for (std::size_t k = 0; k < mesh.size(); ++k)
    if (mesh.boundary_distance(k) > 0.15) f(0, k) = u(rng);
  double young = -1e300;
  for (double p : {1.5, 2.0, 4.0})
    for (double eps : {0.125, 0.03125}) young = std::max(young, lp_norm(mollify(f, eps), p) - lp_norm(f, p));
  o.detail << "max(|S f|-|f|)=" << sci(young) << "; ";
  o.check(young <= kYoungSlack, "Young bound");

  const NodalField aff = NodalField::sample(mesh, [](const Vec& x) { return 0.7 - 1.3 * x[0] + 2.1 * x[1]; });
  double affine = 0.0;
  for (double eps : {0.125, 0.0625}) {
    const NodalField s = mollify(aff, eps);
    for (std::size_t k = 0; k < mesh.size(); ++k)
      if (mesh.boundary_distance(k) > eps / 2) affine = std::max(affine, std::abs(s(0, k) - aff(0, k)));
  }
  o.detail << "affine defect=" << sci(affine) << "; ";
  o.check(affine <= kAffineTol, "affine invariance");

  for (double p : {1.5, 2.0, 4.0}) {
    std::vector<double> C;
    for (int k = 3; k <= 6; ++k) {
      const double eps = std::ldexp(1.0, -k);
      const NodalField g = NodalField::sample(
          mesh, [&](const Vec& x) { return std::sin(kPi * x[0] / eps) * std::sin(kPi * x[1] / eps); });
      C.push_back(lp_norm(mollify(g, eps) - g, p) / (eps * lp_norm(nodal_gradient(g), p)));
    }
    const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
    o.detail << "p=" << p << " C in [" << sci(*lo) << "," << sci(*hi) << "]; ";
    o.check(*lo > 0.0 && *hi / *lo <= kSmoothingSpread, "C spread at p=" + sci(p));
  }
}

ExperimentConfig sweep_config(double p, int kmax) {
  std::vector<int> ks;
  for (int k = 3; k <= kmax; ++k) ks.push_back(k);
  return parse_config({{"model", {{"dim", 1}, {"p", p}, {"weight", trig1d_weight()}}},
                       {"grid", {{"cell_n", 256}, {"mesh_m", 64}, {"k", ks}}},
                       {"problem", {{"boundary", {{"type", "zero"}}}, {"forcing", {{"type", "constant"}, {"value", 1.0}}}}},
                       {"two_scale", {{"tau", 2.0}, {"eval_set", "max_eps"}}},
                       {"seed", 1}});
}

std::vector<double> column(const RateTable& t, double RateRow::*field) {
  std::vector<double> v;
  for (const auto& r : t.rows) v.push_back(r.*field);
  return v;
}

void describe(Outcome& o, const RateTable& t) {
  o.detail << "p=" << t.p << " err_u=[";
  for (const auto& r : t.rows) o.detail << sci(r.err_u) << " ";
  o.detail << "] err_grad=[";
  for (const auto& r : t.rows) o.detail << sci(r.err_grad) << " ";
  o.detail << "] slopes " << (t.fit_u ? sci(t.fit_u->slope) : "-") << "/" << (t.fit_grad ? sci(t.fit_grad->slope) : "-")
           << "; ";
}

// 6. Linear sweep.
void linear_sweep(Outcome& o, const Options&) {
  const auto t0 = std::chrono::steady_clock::now();
  const RateTable t = convergence_sweep(sweep_config(2.0, 7));
  const double dt = seconds_since(t0);
  describe(o, t);
  o.detail << "t=" << sci(dt) << "s";
  o.check(!t.partial && t.rows.size() == 5, "complete table");
  o.check(t.fit_u && t.fit_u->slope >= kLinearSlope, "err_u slope");
  o.check(strictly_decreasing(column(t, &RateRow::err_grad)), "err_grad monotone");
  o.check(dt <= kLinearSeconds, "runtime");
}

// 7. Nonlinear sweeps.
void nonlinear_sweep(Outcome& o, const Options&) {
  for (double p : {1.5, 3.0}) {
    const RateTable t = convergence_sweep(sweep_config(p, 6));
    describe(o, t);
    const std::string tag = " at p=" + sci(p);
    o.check(!t.partial && t.rows.size() == 4, "complete table" + tag);
    o.check(strictly_decreasing(column(t, &RateRow::err_u)), "err_u monotone" + tag);
    o.check(strictly_decreasing(column(t, &RateRow::err_grad)), "err_grad monotone" + tag);
    o.check(t.fit_u && t.fit_u->slope > kNonlinearSlope, "err_u slope" + tag);
    o.check(t.fit_grad && t.fit_grad->slope > kNonlinearSlope, "err_grad slope" + tag);
  }
}

// 8. Holder exponent of xi -> P(., xi).
void holder(Outcome& o, const Options&) {
  const PeriodicGrid grid(2, 64);
  for (double p : {2.0, 4.0, 1.5}) {
    const double exponent = p == 2.0 ? 1.0 : (p > 2.0 ? 2.0 / p : 1.0 / (3.0 - p));
    const HolderFit f = holder_in_xi(FluxModel(2, p, layered2d()), grid, {});
    o.detail << "p=" << p << " slope=" << sci(f.fit.slope) << " (>= " << sci(exponent - kHolderMargin) << "); ";
    o.check(f.fit.slope >= exponent - kHolderMargin, "exponent at p=" + sci(p));
  }
}

// 9. Ansatz from the chi problem on the diagonal-shift weight.
void ansatz(Outcome& o, const Options&) {
  for (double p : {2.0, 3.0}) {
    const Section5Report r = section5_example(parse_config(
        {{"model", {{"dim", 2}, {"p", p}, {"weight", profile_weight("diagonal_shift")}}}, {"grid", {{"cell_n", 64}}}}));
    double ratio = 0.0;
    bool within = true;
    for (const auto& c : r.cases) {
      ratio = std::max(ratio, c.ansatz_residual / std::max(c.direct_residual, 1e-9));
      within = within && c.ansatz_residual <= kAnsatzFactor * std::max(c.direct_residual, 1e-9);
    }
    o.detail << "p=" << p << " ansatz/direct<=" << sci(ratio) << " sum a_hat=" << sci(r.a_hat_sum) << "; ";
    o.check(within, "ansatz residual at p=" + sci(p));
    o.check(std::abs(r.a_hat_sum) > kAnsatzSum, "sum of effective coefficients at p=" + sci(p));
  }
}

// 10. Large-scale decay of the Dirichlet energy.
void large_scale(Outcome& o, const Options&) {
  const json w = {{"type", "trig"},
                  {"base", 2.0},
                  {"modes",
                   {{{"amplitude", 0.5}, {"k", {1, 0}}, {"phase", 0.0}}, {{"amplitude", 0.5}, {"k", {0, 1}}, {"phase", 0.0}}}}};
  const ExperimentConfig cfg = parse_config(
      {{"model", {{"dim", 2}, {"p", 2.0}, {"weight", w}}},
       {"grid", {{"mesh_m", 16}, {"k", {4, 5}}}},
       {"problem",
        {{"boundary", {{"type", "affine"}, {"offset", 0.0}, {"slope", {1.0, 0.5}}}}, {"forcing", {{"type", "zero"}}}}},
       {"largescale", {{"center", {0.5, 0.5}}, {"r_max", 0.25}, {"r_min_factor", 2.0}}}});
  const auto t0 = std::chrono::steady_clock::now();
  const LargeScaleReport r = large_scale_experiment(cfg);
  const double dt = seconds_since(t0);
  for (const auto& row : r.rows) o.detail << "eps=" << row.eps << " slope=" << sci(row.decay.fit.slope) << "; ";
  o.detail << "t=" << sci(dt) << "s";
  o.check(r.rows.size() == 2 && r.worst_slope >= kDecaySlope, "decay slope");
  o.check(dt <= kDecaySeconds, "runtime");
}

// 11. Structure sampling on every benchmark model.
void structure(Outcome& o, const Options&) {
  struct Case {
    int dim;
    double p;
    json weight;
  };
  const std::vector<Case> cases = {{1, 1.5, trig1d_weight()},          {1, 2.0, trig1d_weight()},
                                   {1, 3.0, trig1d_weight()},          {2, 2.0, profile_weight("layered")},
                                   {2, 3.0, profile_weight("layered")}, {2, 4.0, profile_weight("layered")},
                                   {2, 2.0, profile_weight("diagonal_shift")},
                                   {2, 3.0, profile_weight("diagonal_shift")}};
  for (const Case& c : cases) {
    const ExperimentConfig cfg = parse_config({{"model", {{"dim", c.dim}, {"p", c.p}, {"weight", c.weight}}},
                                               {"grid", {{"cell_n", c.dim == 1 ? 256 : 32}}},
                                               {"structure", {{"samples", kStructureSamples}}},
                                               {"seed", 1}});
    const StructureReport r = structure_verify(cfg);
    const double lo = (1.0 - kSandwichBand) * r.weight_lower * r.unit_sandwich.mu0;
    const double hi = (1.0 + kSandwichBand) * r.weight_upper * r.unit_sandwich.mu1;
    const bool inside = r.sandwich.mu0 > 0.0 && r.sandwich.mu0 >= lo && r.sandwich.mu1 <= hi;
    const std::string tag = std::string(c.weight["type"]) + " d=" + std::to_string(c.dim) + " p=" + sci(c.p);
    o.check(r.sandwich.samples == kStructureSamples && r.sandwich.violations == 0, "sandwich violations " + tag);
    o.check(inside, "sandwich constants " + tag);
    if (c.dim == 2 && c.p == 3.0 && c.weight["type"] == "diagonal_shift") {
      o.detail << tag << ": effective mu0=" << sci(r.effective.mu0) << " coercivity=" << sci(r.effective.coercivity)
               << " violations=" << r.effective.violations << "; ";
      o.check(r.effective.violations == 0 && r.effective.coercivity > 0.0, "effective coercivity " + tag);
    }
  }
  o.detail << cases.size() << " models, " << kStructureSamples << " samples each";
}

// 12. Byte-identical sweep CSV across runs and thread counts.
void determinism(Outcome& o, const Options& opt) {
  const json doc = {{"model", {{"dim", 1}, {"p", 3.0}, {"weight", trig1d_weight()}}},
                    {"grid", {{"cell_n", 128}, {"mesh_m", 16}, {"k", {3, 4, 5}}}},
                    {"seed", 11}};
  fs::create_directories(opt.work);
  const fs::path cfg_path = opt.work / "determinism.json";
  std::ofstream(cfg_path) << doc.dump(2);
  std::vector<std::string> outputs;
  for (int threads : {1, 2, 1}) {
    const fs::path dir = opt.work / ("det_" + std::to_string(outputs.size()));
    fs::remove_all(dir);
    if (!opt.cli.empty()) {
      const std::string cmd = "\"" + opt.cli + "\" --config \"" + cfg_path.string() + "\" --threads " +
                              std::to_string(threads) + " --out \"" + dir.string() + "\" sweep > /dev/null";
      if (std::system(cmd.c_str()) != 0) {
        o.check(false, "sweep command failed");
        return;
      }
    } else {
      ExperimentConfig cfg = parse_config(doc);
      cfg.threads = threads;
      emit_report(convergence_sweep(cfg), ReportFormat::csv, dir);
    }
    std::ifstream in(dir / "sweep.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    outputs.push_back(ss.str());
  }
  o.detail << (opt.cli.empty() ? "library" : "cli") << " runs with 1, 2, 1 threads, " << outputs[0].size() << " bytes";
  o.check(!outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2], "byte identity");
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      opt.cli = argv[++i];
    } else if (a == "--work" && i + 1 < argc) {
      opt.work = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string part;
      while (std::getline(ss, part, ',')) only.insert(std::stoi(part));
    } else {
      std::cerr << "usage: homog_acceptance [--cli PATH] [--work DIR] [--only N[,N...]]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<void(Outcome&, const Options&)>>> criteria = {
      {"1D effective coefficient", effective_coefficient},
      {"constant-coefficient degeneracy", constant_coefficient},
      {"homogeneity suite", homogeneity},
      {"flux-corrector identities", flux_corrector},
      {"smoothing-operator contract", smoothing},
      {"convergence sweep, linear", linear_sweep},
      {"convergence sweep, nonlinear", nonlinear_sweep},
      {"Holder exponents in xi", holder},
      {"diagonal-shift ansatz", ansatz},
      {"large-scale decay", large_scale},
      {"structure sampling", structure},
      {"determinism", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o, opt);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %-32s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
