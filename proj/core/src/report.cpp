#include "homog/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace homog {

namespace {

using json = nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Vec& v, int dim) { return dim == 1 ? json::array({v[0]}) : json::array({v[0], v[1]}); }

json optional_fit(const std::optional<LogLogFit>& f) { return f ? to_json(*f) : json(nullptr); }

}  // namespace

const char* version() noexcept { return HOMOG_VERSION; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string rate_table_csv(const RateTable& t) {
  std::string out = "eps,h,tau,err_u_lp,err_grad_lp,runtime_s\n";
  for (const auto& r : t.rows) {
    out += format_double(r.eps) + ',' + format_double(r.h) + ',' + format_double(r.tau) + ',' +
           format_double(r.err_u) + ',' + format_double(r.err_grad) + ',' + format_double(r.runtime_s) + '\n';
  }
  return out;
}

json to_json(const LogLogFit& f) {
  return {{"slope", number(f.slope)}, {"intercept", number(f.intercept)}, {"residual", number(f.residual)},
          {"points", f.points}};
}

json to_json(const RateTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"k", r.k},
                    {"eps", r.eps},
                    {"h", r.h},
                    {"tau", r.tau},
                    {"err_u_lp", number(r.err_u)},
                    {"err_grad_lp", number(r.err_grad)},
                    {"err_grad_sigma_eps", number(r.err_grad_sigma_eps)},
                    {"err_grad_no_corrector", number(r.err_grad_no_corrector)},
                    {"runtime_s", r.runtime_s},
                    {"newton_iterations", r.iterations},
                    {"residual", number(r.residual)},
                    {"warnings", r.warnings}});
  }
  return {{"dim", t.dim},
          {"p", t.p},
          {"tau", t.tau},
          {"eval_depth", t.eval_depth},
          {"u0_residual", number(t.u0_residual)},
          {"table_residual", number(t.table_residual)},
          {"rows", rows},
          {"slope_err_u", optional_fit(t.fit_u)},
          {"slope_err_grad", optional_fit(t.fit_grad)},
          {"partial", t.partial},
          {"failure", t.failure}};
}

json to_json(const StructureReport& r) {
  const auto sandwich = [](const SandwichReport& s) {
    return json{{"mu0", number(s.mu0)}, {"mu1", number(s.mu1)}, {"violations", s.violations},
                {"samples", s.samples}, {"skipped", s.skipped}};
  };
  const EffectiveStructure& e = r.effective;
  return {{"homogeneity",
           {{"max_defect", number(r.homogeneity.max_defect)},
            {"flagged", r.homogeneity.flagged},
            {"samples", r.homogeneity.samples}}},
          {"sandwich", sandwich(r.sandwich)},
          {"unit_sandwich", sandwich(r.unit_sandwich)},
          {"weight_lower", r.weight_lower},
          {"weight_upper", r.weight_upper},
          {"sandwich_in_bounds", r.sandwich_in_bounds},
          {"lipschitz", {{"mu2", number(r.lipschitz.mu2)}, {"samples", r.lipschitz.samples},
                         {"skipped", r.lipschitz.skipped}}},
          {"effective",
           {{"mu0", number(e.mu0)},
            {"mu1", number(e.mu1)},
            {"coercivity", number(e.coercivity)},
            {"lipschitz", number(e.lipschitz)},
            {"holder", number(e.holder)},
            {"violations", e.violations},
            {"samples", e.samples},
            {"skipped", e.skipped}}},
          {"table_residual", number(r.table_residual)}};
}

json to_json(const Section5Report& r) {
  json out = {{"dim", r.dim}, {"p", r.p}};
  if (r.dim == 1) {
    out["a_numeric"] = r.a_numeric;
    out["a_oracle"] = r.a_oracle;
    out["relative_error"] = number(r.relative_error);
    return out;
  }
  json cases = json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"xi", vec(c.xi, 2)},
                     {"ansatz_residual", number(c.ansatz_residual)},
                     {"direct_residual", number(c.direct_residual)},
                     {"mean_defect", number(c.mean_defect)},
                     {"flux_difference", number(c.flux_difference)},
                     {"within_bound", c.within_bound}});
  }
  out["a_hat"] = vec(r.a_hat, 2);
  out["a_hat_sum"] = r.a_hat_sum;
  out["chi_residual"] = number(r.chi_residual);
  out["cases"] = cases;
  return out;
}

json to_json(const LargeScaleReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"eps", row.eps},
                    {"residual", number(row.residual)},
                    {"fit", to_json(row.decay.fit)},
                    {"radii", row.decay.radii},
                    {"integrals", row.decay.integrals}});
  }
  return {{"rows", rows}, {"worst_slope", number(r.worst_slope)}};
}

json with_metadata(json payload, const ExperimentConfig& cfg, const std::string& kind) {
  json cfg_doc = to_json(cfg);
  cfg_doc["output"].erase("dir");
  cfg_doc["output"].erase("format");
  cfg_doc.erase("threads");
  return {{"metadata",
           {{"kind", kind}, {"config_hash", config_hash(cfg)}, {"tool_version", version()}, {"seed", cfg.seed},
            {"config", cfg_doc}}},
          {"result", std::move(payload)}};
}

std::filesystem::path write_text(const std::string& text, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error("write failed for " + path.string());
  return path;
}

std::filesystem::path write_json(const json& doc, const std::filesystem::path& path) {
  return write_text(doc.dump(2) + "\n", path);
}

std::filesystem::path emit_report(const RateTable& table, ReportFormat format, const std::filesystem::path& dir,
                                  const std::string& stem) {
  if (format == ReportFormat::csv) return write_text(rate_table_csv(table), dir / (stem + ".csv"));
  json doc = {{"metadata", {{"kind", "sweep"}, {"config_hash", table.config_hash}, {"tool_version", version()},
                            {"seed", table.seed}}},
              {"result", to_json(table)}};
  return write_json(doc, dir / (stem + ".json"));
}

}  // namespace homog
