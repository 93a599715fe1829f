#pragma once

// Serialization of experiment reports. Output is a pure function of the
// report, so identical inputs give byte-identical files.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "homog/experiments.hpp"

namespace homog {

/// Library version string.
const char* version() noexcept;

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Header "eps,h,tau,err_u_lp,err_grad_lp,runtime_s" plus one line per row.
std::string rate_table_csv(const RateTable& table);

nlohmann::json to_json(const RateTable& table);
nlohmann::json to_json(const StructureReport& rep);
nlohmann::json to_json(const Section5Report& rep);
nlohmann::json to_json(const LargeScaleReport& rep);
nlohmann::json to_json(const LogLogFit& fit);

/// Wraps a payload with the metadata block (config hash, version, seed).
nlohmann::json with_metadata(nlohmann::json payload, const ExperimentConfig& cfg, const std::string& kind);

/// Writes `stem`.csv or `stem`.json under dir (created if missing). Throws
/// Error naming the path on I/O failure. Returns the written path.
std::filesystem::path emit_report(const RateTable& table, ReportFormat format, const std::filesystem::path& dir,
                                  const std::string& stem = "sweep");
std::filesystem::path write_json(const nlohmann::json& doc, const std::filesystem::path& path);
std::filesystem::path write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace homog
