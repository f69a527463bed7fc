#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "eitprop/config.hpp"
#include "eitprop/medium.hpp"
#include "eitprop/propagation.hpp"

namespace eitprop {

struct MediumSummary {
  std::string name;
  DerivedQuantities derived;
  double length = 0.0;                 // total length in the train
  std::optional<double> group_delay;   // over `length`
  double paraxiality = 0.0;            // |q theta_pump| / k0
  std::optional<DeflectionPrediction> deflection;
};

struct MeasurementResult {
  std::string type;
  std::vector<std::pair<std::string, double>> values;  // ordered
  std::optional<std::string> table;                    // CSV written for this measurement

  std::optional<double> get(const std::string& key) const;
};

struct RunReport {
  std::string name;
  nlohmann::json config;
  std::string config_hash;
  std::vector<MediumSummary> media;
  std::optional<double> talbot_distance;
  std::vector<MeasurementResult> measurements;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  /// Value of `key` in the first measurement of `type`.
  std::optional<double> value(const std::string& type, const std::string& key) const;
};

/// Derived quantities only; never touches a field.
RunReport describe(const ExperimentConfig& config);
std::string format_description(const RunReport& report);

/// Source -> iris -> train -> measurements. Writes artifacts into out_dir.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                         TransferCache* cache = nullptr);

struct SweepPoint {
  double value = 0.0;
  RunReport report;
};

/// One run per value of `param`, each in out_dir/point_NNN, aggregated into
/// out_dir/sweep.csv. Every point config is validated before any run starts.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<double>& values, const std::filesystem::path& out_dir,
                                  std::size_t workers = 1);

/// "%.9g" formatting used by every CSV.
std::string csv_number(double v);

}  // namespace eitprop
