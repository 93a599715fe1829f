#include "homog/experiment_config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace homog {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); }

// Rejects keys outside `allowed`; `where` prefixes messages.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) bad(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) bad(where + "." + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(where + "." + key, "must be finite");
  return d;
}

int get_int(const json& obj, const char* key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad(where + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) bad(where + "." + key, "expected a string");
  return v.get<std::string>();
}

Vec get_vec(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty() || v.size() > 2) bad(where, "expected an array of one or two numbers");
  Vec out{0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad(where, "expected numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

json vec_json(const Vec& v) { return json::array({v[0], v[1]}); }

Profile profile_from(const json& j, const std::string& where) {
  check_keys(j, where, {"type", "base", "modes"});
  Profile pr;
  pr.base = get_number(j, "base", where, 1.0);
  if (j.contains("modes")) {
    if (!j.at("modes").is_array()) bad(where + ".modes", "expected an array");
    for (const auto& m : j.at("modes")) {
      const std::string w = where + ".modes[]";
      check_keys(m, w, {"amplitude", "k", "phase"});
      pr.modes.push_back({get_number(m, "amplitude", w, 0.0), get_int(m, "k", w, 1), get_number(m, "phase", w, 0.0)});
    }
  }
  return pr;
}

json profile_json(const char* type, const Profile& pr) {
  json modes = json::array();
  for (const auto& m : pr.modes) modes.push_back({{"amplitude", m.amplitude}, {"k", m.k}, {"phase", m.phase}});
  return {{"type", type}, {"base", pr.base}, {"modes", modes}};
}

ScalarWeightSpec scalar_weight_from(const json& j, const std::string& where) {
  const std::string type = get_string(j, "type", where, "");
  if (type == "constant") {
    check_keys(j, where, {"type", "value"});
    return ConstantWeight{get_number(j, "value", where, 1.0)};
  }
  if (type == "trig") {
    check_keys(j, where, {"type", "base", "modes"});
    TrigWeight t;
    t.base = get_number(j, "base", where, 1.0);
    if (j.contains("modes")) {
      if (!j.at("modes").is_array()) bad(where + ".modes", "expected an array");
      for (const auto& m : j.at("modes")) {
        const std::string w = where + ".modes[]";
        check_keys(m, w, {"amplitude", "k", "phase"});
        TrigMode mode;
        mode.amplitude = get_number(m, "amplitude", w, 0.0);
        if (m.contains("k")) {
          const Vec k = get_vec(m.at("k"), w + ".k");
          if (k[0] != std::round(k[0]) || k[1] != std::round(k[1])) bad(w + ".k", "wave vector must be integral");
          mode.k = {static_cast<int>(k[0]), static_cast<int>(k[1])};
        }
        mode.phase = get_number(m, "phase", w, 0.0);
        t.modes.push_back(mode);
      }
    }
    return t;
  }
  if (type == "diagonal_shift") return DiagonalShiftWeight{profile_from(j, where)};
  if (type == "layered") return LayeredWeight{profile_from(j, where)};
  bad(where + ".type", "unknown weight type '" + type + "'");
}

json scalar_weight_json(const ScalarWeightSpec& w) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantWeight>) {
          return {{"type", "constant"}, {"value", v.value}};
        } else if constexpr (std::is_same_v<T, TrigWeight>) {
          json modes = json::array();
          for (const auto& m : v.modes)
            modes.push_back({{"amplitude", m.amplitude}, {"k", json::array({m.k[0], m.k[1]})}, {"phase", m.phase}});
          return {{"type", "trig"}, {"base", v.base}, {"modes", modes}};
        } else if constexpr (std::is_same_v<T, DiagonalShiftWeight>) {
          return profile_json("diagonal_shift", v.profile);
        } else if constexpr (std::is_same_v<T, LayeredWeight>) {
          return profile_json("layered", v.profile);
        } else {
          throw UnsupportedError("custom weights cannot be serialized");
        }
      },
      w);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("SHA-256 digest failed");
  }
  EVP_MD_CTX_free(ctx);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

nlohmann::json weight_to_json(const WeightSpec& w) {
  if (const auto* m = std::get_if<MatrixWeight>(&w)) {
    json entries = json::array();
    for (const auto& e : m->entries) entries.push_back(scalar_weight_json(e));
    return {{"type", "matrix"}, {"entries", entries}};
  }
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MatrixWeight>) {
          return {};
        } else {
          return scalar_weight_json(ScalarWeightSpec{v});
        }
      },
      w);
}

WeightSpec weight_from_json(const nlohmann::json& j) {
  const std::string where = "model.weight";
  if (get_string(j, "type", where, "") == "matrix") {
    check_keys(j, where, {"type", "entries"});
    if (!j.contains("entries") || !j.at("entries").is_array()) bad(where + ".entries", "expected an array");
    MatrixWeight m;
    for (const auto& e : j.at("entries")) m.entries.push_back(scalar_weight_from(e, where + ".entries[]"));
    return m;
  }
  return std::visit([](auto&& v) -> WeightSpec { return v; }, scalar_weight_from(j, where));
}

nlohmann::json preset_to_json(const Preset& p) {
  switch (p.kind) {
    case Preset::Kind::zero:
      return {{"type", "zero"}};
    case Preset::Kind::affine:
      return {{"type", "affine"}, {"offset", p.offset}, {"slope", vec_json(p.slope)}};
    case Preset::Kind::sine_product:
      return {{"type", "sine_product"},
              {"amplitude", p.amplitude},
              {"frequency", vec_json(p.frequency)},
              {"phase", vec_json(p.phase)}};
  }
  return {};
}

Preset preset_from_json(const nlohmann::json& j) {
  const std::string where = "problem";
  const std::string type = get_string(j, "type", where, "");
  if (type == "zero") {
    check_keys(j, where, {"type"});
    return Preset::zero();
  }
  if (type == "constant") {
    check_keys(j, where, {"type", "value"});
    return Preset::constant(get_number(j, "value", where, 0.0));
  }
  if (type == "affine") {
    check_keys(j, where, {"type", "offset", "slope"});
    return Preset::affine(get_number(j, "offset", where, 0.0),
                          j.contains("slope") ? get_vec(j.at("slope"), where + ".slope") : Vec{0.0, 0.0});
  }
  if (type == "sine_product") {
    check_keys(j, where, {"type", "amplitude", "frequency", "phase"});
    return Preset::sine_product(
        get_number(j, "amplitude", where, 1.0),
        j.contains("frequency") ? get_vec(j.at("frequency"), where + ".frequency") : Vec{1.0, 1.0},
        j.contains("phase") ? get_vec(j.at("phase"), where + ".phase") : Vec{0.0, 0.0});
  }
  bad(where + ".type", "unknown preset '" + type + "'");
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig c;
  check_keys(doc, "", {"model", "grid", "problem", "two_scale", "solver", "structure", "section5", "largescale",
                       "output", "seed", "threads"});

  if (doc.contains("model")) {
    const json& m = doc.at("model");
    check_keys(m, "model", {"dim", "p", "mu_reg", "weight"});
    c.dim = get_int(m, "dim", "model", c.dim);
    c.p = get_number(m, "p", "model", c.p);
    c.mu_reg = get_number(m, "mu_reg", "model", c.mu_reg);
    if (m.contains("weight")) c.weight = weight_from_json(m.at("weight"));
  }
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check_keys(g, "grid", {"cell_n", "mesh_m", "k"});
    c.cell_n = get_int(g, "cell_n", "grid", c.cell_n);
    c.mesh_m = get_int(g, "mesh_m", "grid", c.mesh_m);
    if (g.contains("k")) {
      if (!g.at("k").is_array()) bad("grid.k", "expected an array of integers");
      c.k.clear();
      for (const auto& v : g.at("k")) {
        if (!v.is_number_integer()) bad("grid.k", "expected integers");
        c.k.push_back(v.get<int>());
      }
    }
  }
  if (doc.contains("problem")) {
    const json& pr = doc.at("problem");
    check_keys(pr, "problem", {"boundary", "forcing"});
    if (pr.contains("boundary")) c.boundary = preset_from_json(pr.at("boundary"));
    if (pr.contains("forcing")) c.forcing = preset_from_json(pr.at("forcing"));
  }
  if (doc.contains("two_scale")) {
    const json& t = doc.at("two_scale");
    check_keys(t, "two_scale", {"tau", "theta", "delta", "vartheta", "n_dir", "eval_set"});
    if (t.contains("tau") && !t.at("tau").is_null()) c.tau = get_number(t, "tau", "two_scale", 0.0);
    c.theta = get_number(t, "theta", "two_scale", c.theta);
    c.delta = get_number(t, "delta", "two_scale", c.delta);
    c.vartheta = get_number(t, "vartheta", "two_scale", c.vartheta);
    c.n_dir = get_int(t, "n_dir", "two_scale", c.n_dir);
    const std::string es = get_string(t, "eval_set", "two_scale", "max_eps");
    if (es == "max_eps") {
      c.eval_set = EvalSet::max_eps;
    } else if (es == "eps") {
      c.eval_set = EvalSet::eps;
    } else {
      bad("two_scale.eval_set", "expected 'max_eps' or 'eps'");
    }
  }
  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s, "solver", {"cell_tol", "cell_max_iter", "domain_tol", "domain_max_iter", "mu_schedule", "strategy"});
    c.cell_tol = get_number(s, "cell_tol", "solver", c.cell_tol);
    c.cell_max_iter = get_int(s, "cell_max_iter", "solver", c.cell_max_iter);
    c.domain_tol = get_number(s, "domain_tol", "solver", c.domain_tol);
    c.domain_max_iter = get_int(s, "domain_max_iter", "solver", c.domain_max_iter);
    if (s.contains("mu_schedule") && !s.at("mu_schedule").is_null()) {
      if (!s.at("mu_schedule").is_array()) bad("solver.mu_schedule", "expected an array");
      for (const auto& v : s.at("mu_schedule")) {
        if (!v.is_number()) bad("solver.mu_schedule", "expected numbers");
        c.mu_schedule.push_back(v.get<double>());
      }
    }
    const std::string st = get_string(s, "strategy", "solver", "newton");
    if (st == "newton") {
      c.strategy = Strategy::newton;
    } else if (st == "picard") {
      c.strategy = Strategy::picard;
    } else {
      bad("solver.strategy", "expected 'newton' or 'picard'");
    }
  }
  if (doc.contains("structure")) {
    check_keys(doc.at("structure"), "structure", {"samples"});
    c.samples = get_int(doc.at("structure"), "samples", "structure", c.samples);
  }
  if (doc.contains("section5")) {
    const json& s = doc.at("section5");
    check_keys(s, "section5", {"xi"});
    if (s.contains("xi")) {
      if (!s.at("xi").is_array() || s.at("xi").empty()) bad("section5.xi", "expected a nonempty array");
      c.ansatz_xi.clear();
      for (const auto& v : s.at("xi")) c.ansatz_xi.push_back(get_vec(v, "section5.xi[]"));
    }
  }
  if (doc.contains("largescale")) {
    const json& l = doc.at("largescale");
    check_keys(l, "largescale", {"center", "r_max", "r_min_factor", "radius_ratio"});
    if (l.contains("center")) c.center = get_vec(l.at("center"), "largescale.center");
    c.r_max = get_number(l, "r_max", "largescale", c.r_max);
    c.r_min_factor = get_number(l, "r_min_factor", "largescale", c.r_min_factor);
    c.radius_ratio = get_number(l, "radius_ratio", "largescale", c.radius_ratio);
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    check_keys(o, "output", {"dir", "format", "record_runtime"});
    c.out_dir = get_string(o, "dir", "output", c.out_dir);
    const std::string f = get_string(o, "format", "output", "csv");
    if (f == "csv") {
      c.format = ReportFormat::csv;
    } else if (f == "json") {
      c.format = ReportFormat::json;
    } else {
      bad("output.format", "expected 'csv' or 'json'");
    }
    c.record_runtime = get_bool(o, "record_runtime", "output", c.record_runtime);
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      bad("seed", "expected a nonnegative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    if (!doc.at("threads").is_number_integer()) bad("threads", "expected an integer");
    c.threads = doc.at("threads").get<int>();
  }

  // Semantic checks.
  if (c.dim != 1 && c.dim != 2) bad("model.dim", "must be 1 or 2");
  if (!(c.p > 1.0 && c.p <= 20.0)) bad("model.p", "must lie in (1, 20]");
  if (!(c.mu_reg >= 0.0)) bad("model.mu_reg", "must be nonnegative");
  if (!power_of_two(c.cell_n) || c.cell_n < 8) bad("grid.cell_n", "must be a power of two >= 8");
  if (c.mesh_m < 4 || c.mesh_m % 4 != 0) bad("grid.mesh_m", "must be a positive multiple of 4");
  if (c.k.empty()) bad("grid.k", "must not be empty");
  for (std::size_t i = 0; i < c.k.size(); ++i) {
    if (c.k[i] < 1 || c.k[i] > 20) bad("grid.k", "entries must lie in [1, 20]");
    if (i > 0 && c.k[i] <= c.k[i - 1]) bad("grid.k", "entries must be strictly increasing");
  }
  const long long n = static_cast<long long>(c.mesh_m) << c.k.back();
  if (n > (c.dim == 1 ? (1LL << 22) : (1LL << 12))) bad("grid", "mesh size mesh_m * 2^max(k) is too large");
  if (c.tau && !(*c.tau > 0.0)) bad("two_scale.tau", "must be positive");
  if (!(c.theta > 0.0 && c.theta < 1.0)) bad("two_scale.theta", "must lie in (0, 1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) bad("two_scale.delta", "must lie in (0, 1)");
  if (!(c.vartheta > 0.0 && c.vartheta <= 1.0)) bad("two_scale.vartheta", "must lie in (0, 1]");
  if (c.n_dir < 4) bad("two_scale.n_dir", "must be at least 4");
  if (!(c.cell_tol > 0.0)) bad("solver.cell_tol", "must be positive");
  if (!(c.domain_tol > 0.0)) bad("solver.domain_tol", "must be positive");
  if (c.cell_max_iter < 1) bad("solver.cell_max_iter", "must be positive");
  if (c.domain_max_iter < 1) bad("solver.domain_max_iter", "must be positive");
  for (std::size_t i = 0; i < c.mu_schedule.size(); ++i)
    if (!(c.mu_schedule[i] >= 0.0) || (i > 0 && !(c.mu_schedule[i] < c.mu_schedule[i - 1])))
      bad("solver.mu_schedule", "must be strictly decreasing and nonnegative");
  if (c.samples < 1) bad("structure.samples", "must be positive");
  if (!(c.r_max > 0.0 && c.r_max <= 0.5)) bad("largescale.r_max", "must lie in (0, 1/2]");
  if (!(c.r_min_factor >= 1.0)) bad("largescale.r_min_factor", "must be at least 1");
  if (!(c.radius_ratio > 1.0)) bad("largescale.radius_ratio", "must exceed 1");
  if (c.threads < 1) bad("threads", "must be positive");
  try {
    Weight w(c.weight, c.dim);
  } catch (const Error& e) {
    bad("model.weight", e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json mu = json::array();
  for (double m : c.mu_schedule) mu.push_back(m);
  json xi = json::array();
  for (const Vec& v : c.ansatz_xi) xi.push_back(vec_json(v));
  return {
      {"model", {{"dim", c.dim}, {"p", c.p}, {"mu_reg", c.mu_reg}, {"weight", weight_to_json(c.weight)}}},
      {"grid", {{"cell_n", c.cell_n}, {"mesh_m", c.mesh_m}, {"k", c.k}}},
      {"problem", {{"boundary", preset_to_json(c.boundary)}, {"forcing", preset_to_json(c.forcing)}}},
      {"two_scale",
       {{"tau", c.tau ? json(*c.tau) : json(nullptr)},
        {"theta", c.theta},
        {"delta", c.delta},
        {"vartheta", c.vartheta},
        {"n_dir", c.n_dir},
        {"eval_set", c.eval_set == EvalSet::max_eps ? "max_eps" : "eps"}}},
      {"solver",
       {{"cell_tol", c.cell_tol},
        {"cell_max_iter", c.cell_max_iter},
        {"domain_tol", c.domain_tol},
        {"domain_max_iter", c.domain_max_iter},
        {"mu_schedule", mu},
        {"strategy", c.strategy == Strategy::newton ? "newton" : "picard"}}},
      {"structure", {{"samples", c.samples}}},
      {"section5", {{"xi", xi}}},
      {"largescale",
       {{"center", vec_json(c.center)},
        {"r_max", c.r_max},
        {"r_min_factor", c.r_min_factor},
        {"radius_ratio", c.radius_ratio}}},
      {"output",
       {{"dir", c.out_dir}, {"format", c.format == ReportFormat::csv ? "csv" : "json"}, {"record_runtime", c.record_runtime}}},
      {"seed", c.seed},
      {"threads", c.threads},
  };
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j["output"].erase("dir");
  j["output"].erase("format");
  j.erase("threads");
  return sha256_hex(j.dump());
}

FluxModel build_model(const ExperimentConfig& cfg) {
  return FluxModel(cfg.dim, cfg.p, Weight(cfg.weight, cfg.dim), cfg.mu_reg);
}

CellSolveConfig cell_config(const ExperimentConfig& cfg) {
  CellSolveConfig c;
  c.tol = cfg.cell_tol;
  c.max_iter = cfg.cell_max_iter;
  c.mu_schedule = cfg.mu_schedule;
  c.strategy = cfg.strategy;
  return c;
}

DomainSolveConfig domain_config(const ExperimentConfig& cfg) {
  DomainSolveConfig c;
  c.tol = cfg.domain_tol;
  c.max_iter = cfg.domain_max_iter;
  c.mu_schedule = cfg.mu_schedule;
  return c;
}

TwoScaleOptions two_scale_options(const ExperimentConfig& cfg) { return {cfg.delta, cfg.theta}; }

std::vector<double> eps_list(const ExperimentConfig& cfg) {
  std::vector<double> out;
  for (int k : cfg.k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

int mesh_size(const ExperimentConfig& cfg) { return cfg.mesh_m << cfg.k.back(); }

}  // namespace homog
