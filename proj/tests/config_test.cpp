#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "doctest.h"
#include "eitprop/config.hpp"
#include "eitprop/error.hpp"

using namespace eitprop;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json base_tree() {
  return json::parse(R"({
    "name": "unit",
    "grid": {"nx": 128, "ny": 64, "dx_m": 20e-6, "dy_m": 20e-6},
    "media": {
      "cell": {"d_m2_per_s": 1.1e-3, "gamma_hz": 70e3, "alpha_per_m": 60,
               "delta_over_gamma": -1, "group_velocity_over_qd": 1,
               "theta_pump_rad": [2e-4, 0]}
    },
    "source": {"type": "gaussian", "waist_m": 3e-4},
    "train": [{"medium": "free", "length_m": 0.01},
              {"medium": "cell", "length_m": 0.05, "snapshot": true}],
    "measurements": [{"type": "deflection"}, {"type": "widths"}]
  })");
}

ExperimentConfig parse(const json& t) { return parse_config(t, "."); }

}  // namespace

TEST_CASE("a valid config parses") {
  const ExperimentConfig cfg = parse(base_tree());
  CHECK(cfg.name == "unit");
  CHECK(cfg.grid.nx == 128);
  CHECK(cfg.grid.dy == 20e-6);
  CHECK(cfg.wavelength == kRb87D1Wavelength);
  REQUIRE(cfg.media.contains("cell"));
  const MediumParams& p = cfg.media.at("cell");
  CHECK(p.gamma == doctest::Approx(kTwoPi * 70e3));
  CHECK(p.delta == doctest::Approx(-p.gamma));
  CHECK(p.gamma_p == doctest::Approx(p.gamma * p.gamma / (p.alpha * p.q() * p.diffusion)));
  CHECK(p.theta_pump == Vec2{2e-4, 0.0});
  REQUIRE(cfg.train.size() == 2);
  CHECK(cfg.train[1].snapshot);
  CHECK_FALSE(cfg.train[0].snapshot);
  CHECK(cfg.medium_length("cell") == 0.05);
  CHECK(cfg.medium_length("free") == 0.01);
  REQUIRE(cfg.measurements.size() == 2);
  CHECK(measurement_name(cfg.measurements[0]) == "deflection");
  CHECK(measurement_name(cfg.measurements[1]) == "widths");
  CHECK_FALSE(cfg.normalize_loss);
  CHECK(cfg.write_fields);
  CHECK_FALSE(cfg.sweep);
  CHECK(cfg.content_hash.size() == 16);
}

TEST_CASE("unit variants for pump and detuning") {
  json t = base_tree();
  auto& cell = t["media"]["cell"];
  cell.erase("delta_over_gamma");
  cell["delta_hz"] = 35e3;
  cell.erase("group_velocity_over_qd");
  cell["gamma_p_hz"] = 1e4;
  const MediumParams p = parse(t).media.at("cell");
  CHECK(p.delta == doctest::Approx(kTwoPi * 35e3));
  CHECK(p.gamma_p == doctest::Approx(kTwoPi * 1e4));

  cell.erase("gamma_p_hz");
  cell["group_velocity_m_per_s"] = 5000.0;
  const MediumParams v = parse(t).media.at("cell");
  CHECK(v.gamma * v.gamma / (v.alpha * v.gamma_p) == doctest::Approx(5000.0));
}

TEST_CASE("schema violations are ConfigErrors") {
  auto rejects = [](auto mutate) {
    json t = base_tree();
    mutate(t);
    CHECK_THROWS_AS(parse(t), ConfigError);
  };
  rejects([](json& t) { t["colour"] = "blue"; });
  rejects([](json& t) { t["grid"]["nz"] = 4; });
  rejects([](json& t) { t["media"]["cell"]["gamma"] = 1.0; });
  rejects([](json& t) { t["source"]["waist"] = 1.0; });
  rejects([](json& t) { t["train"][0]["extra"] = 1; });
  rejects([](json& t) { t["measurements"][0]["foo"] = 1; });
  rejects([](json& t) { t.erase("name"); });
  rejects([](json& t) { t["name"] = ""; });
  rejects([](json& t) { t.erase("measurements"); });
  rejects([](json& t) { t["grid"]["nx"] = 0; });
  rejects([](json& t) { t["grid"]["nx"] = 12.5; });
  rejects([](json& t) { t["grid"]["dx_m"] = -1e-6; });
  rejects([](json& t) { t["grid"]["dx_m"] = "5um"; });
  rejects([](json& t) { t["media"]["cell"]["delta_hz"] = 0.0; });
  rejects([](json& t) { t["media"]["cell"].erase("delta_over_gamma"); });
  rejects([](json& t) { t["media"]["cell"]["gamma_p_hz"] = 1e4; });
  rejects([](json& t) { t["media"]["cell"].erase("group_velocity_over_qd"); });
  rejects([](json& t) { t["media"]["cell"]["alpha_per_m"] = -1; });
  rejects([](json& t) { t["media"]["free"] = t["media"]["cell"]; });
  rejects([](json& t) { t["train"][1]["medium"] = "vapour"; });
  rejects([](json& t) { t["train"][0]["length_m"] = -0.1; });
  rejects([](json& t) { t["train"] = json::array(); });
  rejects([](json& t) { t.erase("train"); });
  rejects([](json& t) { t.erase("source"); });
  rejects([](json& t) { t["source"]["type"] = "laser"; });
  rejects([](json& t) { t["measurements"].push_back({{"type", "contrast"}}); });
  rejects([](json& t) { t["measurements"].push_back({{"type", "histogram"}}); });
  rejects([](json& t) { t["measurements"].push_back({{"type", "chi_export"}, {"medium", "vapour"},
                                                     {"k_over_k0", {0}}, {"delta_over_gamma", {0}}}); });
  rejects([](json& t) { t["sweep"] = {{"param", "grid.dx_m"}}; });
  rejects([](json& t) { t["normalize_loss"] = 1; });
  rejects([](json& t) { t["source"] = {{"type", "grating"}, {"period_m", 3e-4}, {"axis", "z"}}; });
  rejects([](json& t) {
    t["source"] = {{"type", "mask"}, {"path", "a.pgm"}, {"pitch_m", 1e-5}, {"resample", "cubic"}};
  });
  rejects([](json& t) { t["source"]["iris"] = {{"k_cut_per_m", 1e4}, {"k_cut_over_k0", 0.5}, {"medium", "cell"}}; });
  rejects([](json& t) { t["source"]["iris"] = {{"k_cut_over_k0", 0.5}, {"medium", "free"}}; });
}

TEST_CASE("measurements without fields need no source") {
  json t = base_tree();
  t.erase("source");
  t.erase("train");
  t["measurements"] = json::parse(R"([
    {"type": "chi_export", "medium": "cell", "k_over_k0": [0, 0.5], "delta_over_gamma": [-1, 1]},
    {"type": "transmission_sweep", "medium": "cell", "delta_over_gamma": [-2, 0, 2], "length_m": 0.05}
  ])");
  const ExperimentConfig cfg = parse(t);
  CHECK(cfg.measurements.size() == 2);
  CHECK(cfg.train.empty());
  CHECK_FALSE(cfg.source);
  t["measurements"].push_back({{"type", "widths"}});
  CHECK_THROWS_AS(parse(t), ConfigError);
}

TEST_CASE("sources, iris and sweep block") {
  json t = base_tree();
  t["source"] = json::parse(R"({"type": "grating", "period_m": 302e-6, "duty": 0.5, "axis": "y",
                                "envelope_half_width_m": 1e-3,
                                "iris": {"k_cut_over_k0": 0.9, "medium": "cell"}})");
  t["measurements"] = json::parse(R"([{"type": "contrast", "window_half_width_m": 6e-4}])");
  t["sweep"] = json::parse(R"({"param": "media.cell.delta_over_gamma", "values": [-1, 0, 1]})");
  const ExperimentConfig cfg = parse(t);
  const auto& g = std::get<GratingSource>(cfg.source->shape).spec;
  CHECK(g.period == 302e-6);
  CHECK(g.axis == GratingAxis::kY);
  CHECK(*g.envelope_half_width == 1e-3);
  REQUIRE(cfg.source->iris);
  CHECK(*cfg.source->iris->k_cut_over_k0 == 0.9);
  CHECK(cfg.source->iris->medium == "cell");
  REQUIRE(cfg.sweep);
  CHECK(cfg.sweep->param == "media.cell.delta_over_gamma");
  CHECK(cfg.sweep->values == std::vector<double>{-1, 0, 1});
  CHECK(*std::get<ContrastMeasurement>(cfg.measurements[0]).window_half_width == 6e-4);
}

TEST_CASE("mask paths resolve against the config directory") {
  json t = base_tree();
  t["source"] = {{"type", "mask"}, {"path", "glyph.pgm"}, {"pitch_m", 1e-5}, {"resample", "bilinear"}};
  const ExperimentConfig cfg = parse_config(t, "/some/dir");
  const auto& m = std::get<MaskSource>(cfg.source->shape);
  CHECK(m.path == std::filesystem::path("/some/dir/glyph.pgm"));
  CHECK(m.resample == Resample::kBilinear);
}

TEST_CASE("set_param") {
  const json t = base_tree();
  const json a = set_param(t, "media.cell.delta_over_gamma", 1.0);
  CHECK(a["media"]["cell"]["delta_over_gamma"] == 1.0);
  CHECK(t["media"]["cell"]["delta_over_gamma"] == -1);
  const json b = set_param(t, "media.cell.theta_pump_rad.0", 3e-4);
  CHECK(b["media"]["cell"]["theta_pump_rad"][0] == 3e-4);
  CHECK(parse(b).media.at("cell").theta_pump.x == 3e-4);
  const json c = set_param(t, "train.1.length_m", 0.02);
  CHECK(parse(c).medium_length("cell") == 0.02);

  CHECK_THROWS_AS(set_param(t, "", 1.0), ConfigError);
  CHECK_THROWS_AS(set_param(t, "media.cell.missing", 1.0), ConfigError);
  CHECK_THROWS_AS(set_param(t, "name", 1.0), ConfigError);
  CHECK_THROWS_AS(set_param(t, "train.x.length_m", 1.0), ConfigError);
  CHECK_THROWS_AS(set_param(t, "train.7.length_m", 1.0), ConfigError);
  CHECK_THROWS_AS(set_param(t, "media.cell", 1.0), ConfigError);
}

TEST_CASE("content hash") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const json t = base_tree();
  CHECK(parse(t).content_hash == parse(t).content_hash);
  CHECK(parse(t).content_hash != parse(set_param(t, "grid.dx_m", 21e-6)).content_hash);
}

TEST_CASE("load_config") {
  const auto dir = std::filesystem::temp_directory_path() / ("eitprop_cfg_" + std::to_string(std::rand()));
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "ok.json") << base_tree().dump(2);
  std::ofstream(dir / "broken.json") << "{\"name\": ";
  const ExperimentConfig cfg = load_config(dir / "ok.json");
  CHECK(cfg.base_dir == dir);
  CHECK(cfg.content_hash == parse(base_tree()).content_hash);
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), IoError);
  std::filesystem::remove_all(dir);
}
