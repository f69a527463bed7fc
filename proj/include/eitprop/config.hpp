#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "eitprop/grid.hpp"
#include "eitprop/medium.hpp"
#include "eitprop/scenes.hpp"

namespace eitprop {

struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  Grid2D make() const { return Grid2D(nx, ny, dx, dy); }
};

struct GratingSource {
  GratingSpec spec;
};
struct GaussianSource {
  double waist = 0.0;
  Vec2 center{};
  Vec2 tilt{};
};
struct PointSource {
  double radius = 0.0;
};
struct MaskSource {
  std::filesystem::path path;  // resolved against the config directory
  double pitch = 0.0;
  Resample resample = Resample::kNearest;
};

struct IrisSpec {
  std::optional<double> k_cut;        // 1/m
  std::optional<double> k_cut_over_k0;
  std::string medium;                 // k0 reference when k_cut_over_k0 is used
};

struct SourceSpec {
  std::variant<GratingSource, GaussianSource, PointSource, MaskSource> shape;
  std::optional<IrisSpec> iris;
};

inline constexpr const char* kFreeSpaceMedium = "free";

struct TrainEntry {
  std::string medium;  // "free" or a key of ExperimentConfig::media
  double length = 0.0;
  bool snapshot = false;
};

struct ContrastMeasurement {
  std::optional<double> window_half_width;
};
struct DeflectionMeasurement {
  std::optional<double> length;  // default: total EIT length in the train
};
struct WidthsMeasurement {};
struct TransmissionMeasurement {};
struct TransmissionSweepMeasurement {
  std::string medium;
  std::vector<double> delta_over_gamma;
  std::optional<double> length;  // default: that medium's length in the train
};
struct ChiExportMeasurement {
  std::string medium;
  std::vector<double> k_over_k0;
  std::vector<double> delta_over_gamma;
};
struct L2VsInputMeasurement {};
struct L2VsFreeSpaceMeasurement {
  double length = 0.0;
};

using Measurement = std::variant<ContrastMeasurement, DeflectionMeasurement, WidthsMeasurement,
                                 TransmissionMeasurement, TransmissionSweepMeasurement, ChiExportMeasurement,
                                 L2VsInputMeasurement, L2VsFreeSpaceMeasurement>;

std::string measurement_name(const Measurement& m);

struct SweepSpec {
  std::string param;  // dotted path into the config tree, array indices as numbers
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name;
  GridSpec grid;
  double wavelength = kRb87D1Wavelength;
  std::map<std::string, MediumParams> media;
  std::optional<SourceSpec> source;
  std::vector<TrainEntry> train;
  std::vector<Measurement> measurements;
  bool normalize_loss = false;
  bool write_fields = true;
  std::optional<SweepSpec> sweep;

  nlohmann::json raw;          // the validated tree, echoed into reports
  std::string content_hash;    // FNV-1a 64 of raw.dump(), hex
  std::filesystem::path base_dir;

  /// Sum of train lengths that use the named medium.
  double medium_length(const std::string& medium) const;
};

/// Validates and converts a config tree. Unknown keys, missing keys, wrong
/// types and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& tree, const std::filesystem::path& base_dir);

/// Reads and parses a config file. Unreadable file: IoError. Bad JSON: ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json load_config_tree(const std::filesystem::path& path);

/// Returns a copy of `tree` with the numeric leaf at `path` replaced by value.
nlohmann::json set_param(const nlohmann::json& tree, const std::string& path, double value);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace eitprop
