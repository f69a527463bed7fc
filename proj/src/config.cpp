#include "eitprop/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

#include "eitprop/error.hpp"

namespace eitprop {
namespace {

using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string where) : node_(node), where_(std::move(where)) {
    if (!node_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& at(const std::string& key) {
    if (!node_.contains(key)) fail("missing key '" + key + "'");
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail("'" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("'" + key + "' must be finite");
    return d;
  }

  double positive(const std::string& key) {
    const double d = number(key);
    if (!(d > 0.0)) fail("'" + key + "' must be positive");
    return d;
  }

  double non_negative(const std::string& key) {
    const double d = number(key);
    if (d < 0.0) fail("'" + key + "' must be non-negative");
    return d;
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::size_t count(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 2) fail("'" + key + "' must be an integer >= 2");
    return v.get<std::size_t>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) fail("'" + key + "' must be true or false");
    return v.get<bool>();
  }

  Vec2 vec2(const std::string& key, Vec2 fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail("'" + key + "' must be a 2-element numeric array");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array() || v.empty()) fail("'" + key + "' must be a non-empty numeric array");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail("'" + key + "' must contain finite numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  // Exactly one of `keys` must be present; returns its index.
  std::size_t one_of(std::initializer_list<const char*> keys) {
    std::size_t found = keys.size();
    std::size_t i = 0;
    std::string names;
    for (const char* k : keys) {
      names += names.empty() ? k : std::string(" | ") + k;
      if (has(k)) {
        if (found != keys.size()) fail("keys " + names + " are mutually exclusive");
        found = i;
      }
      ++i;
    }
    if (found == keys.size()) fail("needs exactly one of " + names);
    return found;
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where_ + ": " + msg); }

  const std::string& where() const { return where_; }

 private:
  const json& node_;
  std::string where_;
  std::set<std::string> seen_;
};

GridSpec parse_grid(const json& node) {
  ObjectReader r(node, "grid");
  GridSpec g{r.count("nx"), r.count("ny"), r.positive("dx_m"), r.positive("dy_m")};
  r.finish();
  return g;
}

MediumParams parse_medium(const json& node, const std::string& name, double wavelength) {
  ObjectReader r(node, "media." + name);
  MediumParams p;
  p.wavelength = wavelength;
  p.diffusion = r.positive("d_m2_per_s");
  p.gamma = kTwoPi * r.positive("gamma_hz");
  p.alpha = r.non_negative("alpha_per_m");
  p.theta_pump = r.vec2("theta_pump_rad", {});

  switch (r.one_of({"delta_hz", "delta_over_gamma"})) {
    case 0: p.delta = kTwoPi * r.number("delta_hz"); break;
    default: p.delta = r.number("delta_over_gamma") * p.gamma; break;
  }

  switch (r.one_of({"gamma_p_hz", "group_velocity_m_per_s", "group_velocity_over_qd"})) {
    case 0: p.gamma_p = kTwoPi * r.non_negative("gamma_p_hz"); break;
    case 1: {
      const double vg = r.positive("group_velocity_m_per_s");
      if (!(p.alpha > 0.0)) r.fail("a target group velocity needs alpha_per_m > 0");
      p.gamma_p = pump_power_for(vg, p);
      break;
    }
    default: {
      const double ratio = r.positive("group_velocity_over_qd");
      if (!(p.alpha > 0.0)) r.fail("a target group velocity needs alpha_per_m > 0");
      p.gamma_p = pump_power_for(ratio * p.q() * p.diffusion, p);
      break;
    }
  }
  r.finish();
  try {
    validate(p);
  } catch (const PhysicsError& e) {
    r.fail(e.what());
  }
  return p;
}

GratingAxis parse_axis(ObjectReader& r) {
  if (!r.has("axis")) return GratingAxis::kX;
  const std::string a = r.string("axis");
  if (a == "x") return GratingAxis::kX;
  if (a == "y") return GratingAxis::kY;
  r.fail("axis must be \"x\" or \"y\"");
}

SourceSpec parse_source(const json& node, const std::filesystem::path& base_dir,
                        const std::map<std::string, MediumParams>& media) {
  ObjectReader r(node, "source");
  SourceSpec s;
  const std::string type = r.string("type");
  if (type == "grating") {
    GratingSpec g;
    g.period = r.positive("period_m");
    g.duty = r.has("duty") ? r.positive("duty") : 0.5;
    if (g.duty > 1.0) r.fail("duty must be in (0, 1]");
    g.axis = parse_axis(r);
    if (r.has("envelope_half_width_m")) g.envelope_half_width = r.positive("envelope_half_width_m");
    s.shape = GratingSource{g};
  } else if (type == "gaussian") {
    s.shape = GaussianSource{r.positive("waist_m"), r.vec2("center_m", {}), r.vec2("tilt_rad", {})};
  } else if (type == "point") {
    s.shape = PointSource{r.positive("radius_m")};
  } else if (type == "mask") {
    MaskSource m;
    m.path = r.string("path");
    if (m.path.is_relative()) m.path = base_dir / m.path;
    m.pitch = r.positive("pitch_m");
    if (r.has("resample")) {
      const std::string mode = r.string("resample");
      if (mode == "nearest") {
        m.resample = Resample::kNearest;
      } else if (mode == "bilinear") {
        m.resample = Resample::kBilinear;
      } else {
        r.fail("resample must be \"nearest\" or \"bilinear\"");
      }
    }
    s.shape = m;
  } else {
    r.fail("unknown source type '" + type + "'");
  }

  if (r.has("iris")) {
    ObjectReader ir(r.at("iris"), "source.iris");
    IrisSpec iris;
    if (ir.one_of({"k_cut_per_m", "k_cut_over_k0"}) == 0) {
      iris.k_cut = ir.positive("k_cut_per_m");
    } else {
      iris.k_cut_over_k0 = ir.positive("k_cut_over_k0");
      iris.medium = ir.string("medium");
      if (!media.contains(iris.medium)) ir.fail("unknown medium '" + iris.medium + "'");
    }
    ir.finish();
    s.iris = iris;
  }
  r.finish();
  return s;
}

Measurement parse_measurement(const json& node, std::size_t index, const std::map<std::string, MediumParams>& media) {
  ObjectReader r(node, "measurements[" + std::to_string(index) + "]");
  const std::string type = r.string("type");
  auto medium_ref = [&]() {
    std::string m = r.string("medium");
    if (!media.contains(m)) r.fail("unknown medium '" + m + "'");
    return m;
  };
  Measurement out;
  if (type == "contrast") {
    ContrastMeasurement m;
    if (r.has("window_half_width_m")) m.window_half_width = r.positive("window_half_width_m");
    out = m;
  } else if (type == "deflection") {
    DeflectionMeasurement m;
    if (r.has("length_m")) m.length = r.positive("length_m");
    out = m;
  } else if (type == "widths") {
    out = WidthsMeasurement{};
  } else if (type == "transmission") {
    out = TransmissionMeasurement{};
  } else if (type == "transmission_sweep") {
    TransmissionSweepMeasurement m;
    m.medium = medium_ref();
    m.delta_over_gamma = r.numbers("delta_over_gamma");
    if (r.has("length_m")) m.length = r.non_negative("length_m");
    out = m;
  } else if (type == "chi_export") {
    ChiExportMeasurement m;
    m.medium = medium_ref();
    m.k_over_k0 = r.numbers("k_over_k0");
    m.delta_over_gamma = r.numbers("delta_over_gamma");
    out = m;
  } else if (type == "l2_vs_input") {
    out = L2VsInputMeasurement{};
  } else if (type == "l2_vs_free_space") {
    out = L2VsFreeSpaceMeasurement{r.number("length_m")};
  } else {
    r.fail("unknown measurement type '" + type + "'");
  }
  r.finish();
  return out;
}

bool needs_fields(const Measurement& m) {
  return !std::holds_alternative<TransmissionSweepMeasurement>(m) && !std::holds_alternative<ChiExportMeasurement>(m);
}

}  // namespace

std::string measurement_name(const Measurement& m) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ContrastMeasurement>) return "contrast";
        else if constexpr (std::is_same_v<T, DeflectionMeasurement>) return "deflection";
        else if constexpr (std::is_same_v<T, WidthsMeasurement>) return "widths";
        else if constexpr (std::is_same_v<T, TransmissionMeasurement>) return "transmission";
        else if constexpr (std::is_same_v<T, TransmissionSweepMeasurement>) return "transmission_sweep";
        else if constexpr (std::is_same_v<T, ChiExportMeasurement>) return "chi_export";
        else if constexpr (std::is_same_v<T, L2VsInputMeasurement>) return "l2_vs_input";
        else return "l2_vs_free_space";
      },
      m);
}

double ExperimentConfig::medium_length(const std::string& medium) const {
  double total = 0.0;
  for (const auto& e : train) {
    if (e.medium == medium) total += e.length;
  }
  return total;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& tree, const std::filesystem::path& base_dir) {
  ObjectReader r(tree, "config");
  ExperimentConfig cfg;
  cfg.name = r.string("name");
  if (cfg.name.empty()) r.fail("name must not be empty");
  cfg.grid = parse_grid(r.at("grid"));
  try {
    (void)cfg.grid.make();
  } catch (const PhysicsError& e) {
    r.fail(e.what());
  }
  if (r.has("wavelength_m")) cfg.wavelength = r.positive("wavelength_m");

  if (r.has("media")) {
    const json& media = r.at("media");
    if (!media.is_object()) r.fail("media must be an object");
    for (const auto& [name, node] : media.items()) {
      if (name == kFreeSpaceMedium) r.fail("medium name 'free' is reserved");
      cfg.media.emplace(name, parse_medium(node, name, cfg.wavelength));
    }
  }

  if (r.has("source")) cfg.source = parse_source(r.at("source"), base_dir, cfg.media);

  if (r.has("train")) {
    const json& train = r.at("train");
    if (!train.is_array() || train.empty()) r.fail("train must be a non-empty array");
    for (std::size_t i = 0; i < train.size(); ++i) {
      ObjectReader tr(train[i], "train[" + std::to_string(i) + "]");
      TrainEntry e{tr.string("medium"), tr.non_negative("length_m"), tr.boolean("snapshot", false)};
      if (e.medium != kFreeSpaceMedium && !cfg.media.contains(e.medium)) tr.fail("unknown medium '" + e.medium + "'");
      tr.finish();
      cfg.train.push_back(e);
    }
  }
  if (cfg.source.has_value() != !cfg.train.empty()) r.fail("source and train must be given together");

  const json& measurements = r.at("measurements");
  if (!measurements.is_array()) r.fail("measurements must be an array");
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    Measurement m = parse_measurement(measurements[i], i, cfg.media);
    if (needs_fields(m) && !cfg.source) r.fail("measurement '" + measurement_name(m) + "' needs a source and train");
    if (std::holds_alternative<ContrastMeasurement>(m) &&
        !std::holds_alternative<GratingSource>(cfg.source->shape)) {
      r.fail("contrast measurement needs a grating source");
    }
    cfg.measurements.push_back(std::move(m));
  }

  cfg.normalize_loss = r.boolean("normalize_loss", false);
  cfg.write_fields = r.boolean("write_fields", true);

  if (r.has("sweep")) {
    ObjectReader sr(r.at("sweep"), "sweep");
    cfg.sweep = SweepSpec{sr.string("param"), sr.numbers("values")};
    sr.finish();
  }
  r.finish();

  cfg.raw = tree;
  cfg.content_hash = fnv1a_hex(tree.dump());
  cfg.base_dir = base_dir;
  return cfg;
}

json load_config_tree(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(load_config_tree(path), path.parent_path());
}

json set_param(const json& tree, const std::string& path, double value) {
  if (path.empty()) throw ConfigError("empty parameter path");
  json out = tree;
  json* node = &out;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw ConfigError("parameter path '" + path + "': '" + p + "' is not an array index");
      }
      if (idx >= node->size()) throw ConfigError("parameter path '" + path + "': index out of range");
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(p)) {
      node = &(*node)[p];
    } else {
      throw ConfigError("parameter path '" + path + "' does not address an existing field");
    }
  }
  if (!node->is_number()) throw ConfigError("parameter path '" + path + "' does not address a numeric field");
  *node = value;
  return out;
}

}  // namespace eitprop
