// Experiment driver: run / sweep / describe.
//
// Exit codes: 0 ok, 2 config or usage error, 3 physics error, 4 I/O error.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eitprop/config.hpp"
#include "eitprop/error.hpp"
#include "eitprop/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw eitprop::ConfigError("cannot parse sweep value '" + item + "'");
    }
    if (pos != item.size()) throw eitprop::ConfigError("cannot parse sweep value '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw eitprop::ConfigError("sweep needs at least one value");
  return values;
}

std::filesystem::path out_dir_for(const std::string& flag, const eitprop::ExperimentConfig& cfg) {
  return flag.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(flag);
}

void print_sweep(const std::vector<eitprop::SweepPoint>& points, const std::filesystem::path& out) {
  std::cout << "sweep of " << points.size() << " points written to " << (out / "sweep.csv").string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paraxial propagation of images through EIT vapor media"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::size_t workers = 1;
  std::string param;
  std::string values_csv;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (default out/<name>)");
  run->add_option("--workers", workers, "Concurrent runs for configs with a sweep block")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run a config once per parameter value");
  sweep->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep->add_option("--out", out_dir, "Output directory (default out/<name>)");
  sweep->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--param", param, "Dotted path of a numeric config field")->required();
  sweep->add_option("--values", values_csv, "Comma-separated values")->required();

  auto* describe = app.add_subcommand("describe", "Print derived quantities without simulating");
  describe->add_option("--config", config_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const eitprop::ExperimentConfig cfg = eitprop::load_config(config_path);
    if (describe->parsed()) {
      std::cout << eitprop::format_description(eitprop::describe(cfg));
      return 0;
    }
    const auto out = out_dir_for(out_dir, cfg);
    if (sweep->parsed()) {
      print_sweep(eitprop::run_sweep(cfg, param, parse_values(values_csv), out, workers), out);
      return 0;
    }
    if (cfg.sweep) {
      print_sweep(eitprop::run_sweep(cfg, cfg.sweep->param, cfg.sweep->values, out, workers), out);
      return 0;
    }
    const auto report = eitprop::run_experiment(cfg, out);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& m : report.measurements) {
      for (const auto& [k, v] : m.values) std::cout << m.type << '.' << k << " = " << eitprop::csv_number(v) << '\n';
    }
    std::cout << "report written to " << (out / "report.json").string() << '\n';
    return 0;
  } catch (const eitprop::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const eitprop::PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const eitprop::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}
