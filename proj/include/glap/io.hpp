#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "glap/config.hpp"
#include "glap/error.hpp"
#include "glap/experiments.hpp"

namespace glap::io {

inline constexpr const char* kVersion = "1.0.0";

class IoError : public Error {
 public:
  using Error::Error;
};

// Shortest decimal that reads back to the same double; empty for NaN.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& x) {
  return x ? format_number(*x) : "";
}

struct ResultFiles {
  std::string records;
  std::string summary;
  std::string manifest;
};

inline bool deterministic(experiments::Kind k) {
  using experiments::Kind;
  return k == Kind::rate || k == Kind::boundary || k == Kind::moments || k == Kind::admissible;
}

inline std::string records_csv(const experiments::ExperimentResult& res) {
  bool pair = false;
  for (const auto& r : res.records) pair = pair || r.value2.has_value();
  const bool det = deterministic(res.kind);
  const bool eps = res.kind != experiments::Kind::moments && res.kind != experiments::Kind::admissible;
  std::ostringstream os;
  os << "experiment,n,epsilon,replication,value" << (pair ? ",value2" : "") << "\n";
  for (const auto& r : res.records) {
    os << experiments::to_string(res.kind) << ',' << (det ? "" : std::to_string(r.n)) << ','
       << (eps ? format_number(r.epsilon) : "") << ',' << r.replication << ','
       << format_number(r.value);
    if (pair) os << ',' << format_optional(r.value2);
    os << "\n";
  }
  return os.str();
}

inline std::string summary_csv(const experiments::ExperimentResult& res) {
  const bool det = deterministic(res.kind);
  const bool eps = res.kind != experiments::Kind::moments && res.kind != experiments::Kind::admissible;
  std::ostringstream os;
  os << "n,epsilon,count,mean,variance,ks,corr,median_error,verdict\n";
  for (const auto& s : res.summaries) {
    os << (det ? "" : std::to_string(s.n)) << ',' << (eps ? format_number(s.epsilon) : "") << ','
       << s.count << ',' << (det && res.kind != experiments::Kind::rate &&
                                     res.kind != experiments::Kind::boundary
                                 ? ""
                                 : format_number(s.mean))
       << ',' << (det ? "" : format_number(s.variance)) << ',' << format_optional(s.ks) << ','
       << format_optional(s.corr) << ',' << format_optional(s.median_error) << ',' << s.verdict
       << "\n";
  }
  return os.str();
}

inline config::json manifest_json(const experiments::ExperimentResult& res, const config::Config& cfg,
                                  std::optional<std::uint64_t> seed_override) {
  config::json m;
  m["tool"] = "glap";
  m["version"] = kVersion;
  m["experiment"] = experiments::to_string(res.kind);
  m["seed"] = cfg.experiment.seed;
  m["seed_override"] = seed_override ? config::json(*seed_override) : config::json(nullptr);
  m["convention_factor"] = cfg.experiment.convention_factor;
  m["tolerances"] = cfg.document.at("tolerances");
  m["pass"] = res.pass;
  config::json diag = config::json::object();
  for (const auto& [k, v] : res.diagnostics) {
    diag[k] = std::isfinite(v) ? config::json(v) : config::json(format_number(v));
  }
  m["diagnostics"] = diag;
  m["notes"] = res.notes;
  m["versions"] = {{"glap", kVersion},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long>(__cplusplus)}};
  m["config"] = cfg.document;
  return m;
}

inline void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.close();
  if (!out) throw IoError("write failed for " + path);
}

// Writes <prefix>_records.csv, <prefix>_summary.csv and
// <prefix>_manifest.json, overwriting earlier runs.
inline ResultFiles emit_results(const experiments::ExperimentResult& res, const config::Config& cfg,
                                const std::string& prefix,
                                std::optional<std::uint64_t> seed_override = std::nullopt) {
  require(!prefix.empty(), "output prefix must not be empty");
  ResultFiles f{prefix + "_records.csv", prefix + "_summary.csv", prefix + "_manifest.json"};
  write_file(f.records, records_csv(res));
  write_file(f.summary, summary_csv(res));
  write_file(f.manifest, manifest_json(res, cfg, seed_override).dump(2) + "\n");
  return f;
}

// Human-readable summary table.
inline void print_summary(std::ostream& os, const experiments::ExperimentResult& res) {
  os << experiments::to_string(res.kind) << ": " << (res.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& [k, v] : res.diagnostics) os << "  " << k << " = " << format_number(v) << "\n";
  for (const auto& n : res.notes) os << "  note: " << n << "\n";
  os << "  " << std::string(86, '-') << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %10s %12s %6s %13s %13s %9s %9s %12s  %s\n", "n", "epsilon",
                "count", "mean", "variance", "ks", "corr", "median_err", "verdict");
  os << line;
  auto opt = [](const std::optional<double>& x, const char* fmt) {
    char b[32];
    if (!x) return std::string("-");
    std::snprintf(b, sizeof b, fmt, *x);
    return std::string(b);
  };
  const bool det = deterministic(res.kind);
  for (const auto& s : res.summaries) {
    const std::string n = det ? "-" : std::to_string(s.n);
    std::snprintf(line, sizeof line, "  %10s %12.6g %6zu %13.6g %13.6g %9s %9s %12s  %s\n", n.c_str(),
                  s.epsilon, s.count, s.mean, s.variance, opt(s.ks, "%.4f").c_str(),
                  opt(s.corr, "%.4f").c_str(), opt(s.median_error, "%.4g").c_str(),
                  s.verdict.c_str());
    os << line;
  }
}

}  // namespace glap::io
