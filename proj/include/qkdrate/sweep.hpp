#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qkdrate/compare.hpp"
#include "qkdrate/cv_keyrates.hpp"
#include "qkdrate/rates.hpp"

namespace qkdrate {

inline constexpr const char* kToolVersion = "0.1.0";

enum class AxisScale { Linear, Log };

struct AxisSpec {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 2;
  AxisScale scale = AxisScale::Linear;

  [[nodiscard]] std::vector<double> values() const;
};

struct FixedParams {
  std::optional<double> eta;
  std::optional<double> distance_km;
  double nth = 0.0;
  double sigma2 = 0.0;
  std::optional<double> squeezing_db;
  std::optional<double> mu;
  double max_squeezing_db = kDefaultMaxSqueezingDb;
  bool optimize_va = false;
  std::optional<double> xi_b;
  std::optional<double> q;
  double k0 = 0.0;
  double attenuation_db_per_km = kFiberLossDbPerKm;
  NoisePlacement placement = NoisePlacement::AtOutput;
  double v_phi = 0.0;
  bool dv_includes_v_phi = false;
};

struct SweepConfig {
  std::vector<AxisSpec> axes;
  std::vector<Protocol> protocols;
  FixedParams fixed;
  std::string csv_path;
  std::string metadata_path;
  unsigned threads = 0;
  /// Canonical form of the parsed document, the input to the config hash.
  nlohmann::json canonical;
};

/// Reads a JSON or TOML document (TOML when the path ends in .toml).
nlohmann::json load_config_document(const std::string& path);

/// Validates the schema strictly; unknown keys throw ConfigError.
SweepConfig parse_sweep_config(const nlohmann::json& doc);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const SweepConfig& cfg);

struct SweepTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t failed_cells = 0;
};

/// Evaluates every grid cell; per-cell failures land in the error column.
SweepTable run_sweep(const SweepConfig& cfg);

/// Builds the comparison map named by `kind` (kmap, noise-frontier,
/// loss-frontier) from the config's two axes.
SweepTable run_comparison(const SweepConfig& cfg, const std::string& kind);

/// 17 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

std::string to_csv(const SweepTable& table);
nlohmann::json sweep_metadata(const SweepConfig& cfg, const SweepTable& table,
                              const std::string& kind = "sweep");

/// Writes the CSV and metadata files named by the config.
void write_outputs(const SweepConfig& cfg, const SweepTable& table,
                   const std::string& kind = "sweep");

}  // namespace qkdrate
