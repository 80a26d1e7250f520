#pragma once

#include "cogmc/model.hpp"
#include "cogmc/particle_sim.hpp"
#include "cogmc/underlay.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cogmc {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Invalid configuration document. `what()` is a single line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct Range {
  double from = 0;
  double to = 0;
  int steps = 1;

  /// Evenly spaced values from..to; a single step yields {from}.
  std::vector<double> values() const;
};

/// Swept variable: one of uM, r_SP, eta, t, mu, Tb.
struct SweepSpec {
  std::string variable = "t";
  Range range;
};

struct RecipeParams {
  int slot = 3;       // slot index l for detection and expected-count recipes
  int horizon = 20;   // schedule length for budget recipes
  std::vector<double> mu_values;  // one curve per value; empty: medium.mu
  std::optional<double> eta_fixed;
  // Positions of the competing receiver for the approximation-error map.
  std::optional<Range> grid_x, grid_y, grid_z;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string recipe;
  MediumParams medium;
  Topology topology;
  TrafficModel traffic;
  ControlParams control;
  std::optional<SimConfig> sim;
  SweepSpec sweep;
  RecipeParams params;
  std::string output;

  /// Schema-level and hard physical checks; throws ConfigError.
  void check() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
/// Strict parse: unknown keys, wrong types, or missing required fields throw
/// ConfigError with the offending JSON path.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Reads and parses a file; syntax errors carry line and column.
ExperimentConfig load_config(const std::string& path);

struct Recipe {
  std::string name;
  std::string summary;
  bool stochastic = false;
  ExperimentConfig defaults;
};

/// The ten figure recipes, in catalog order.
const std::vector<Recipe>& list_recipes();
const Recipe& find_recipe(std::string_view name);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Header row, '.' decimals, 17 significant digits.
  std::string to_csv() const;
};

struct ExperimentOutput {
  CsvTable table;
  nlohmann::ordered_json sidecar;
};

/// Runs the recipe named in `cfg`. Stochastic recipes require a seed.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed);

/// Writes <prefix>.csv and <prefix>.json.
void write_outputs(const ExperimentOutput& out, const std::string& prefix);

struct ConfigValidation {
  ExperimentConfig config;
  ValidityReport report;
};

ConfigValidation validate_config(const std::string& path);

/// Places the secondary transmitter on the ray from `start` along +x at
/// distance r_SP from the primary receiver center, on the side of `start`.
Vec3 place_secondary_tx(const Vec3& start, const Vec3& y_P, double r_SP);

}  // namespace cogmc
