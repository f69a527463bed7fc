#include "eitprop/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "eitprop/analysis.hpp"
#include "eitprop/error.hpp"
#include "eitprop/field_io.hpp"
#include "eitprop/scenes.hpp"

namespace eitprop {
namespace {

using json = nlohmann::json;

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw IoError("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(cells[i]);
    }
    out_ << "\r\n";
  }
  ~CsvWriter() = default;
  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing " + path_.string());
  }

 private:
  static std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string q = "\"";
    for (char c : cell) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  std::filesystem::path path_;
  std::ofstream out_;
};

std::vector<MediumSummary> summarize_media(const ExperimentConfig& cfg) {
  std::vector<MediumSummary> out;
  for (const auto& [name, p] : cfg.media) {
    MediumSummary s;
    s.name = name;
    s.derived = derived_quantities(p);
    s.length = cfg.medium_length(name);
    if (s.derived.group_velocity) s.group_delay = s.length / *s.derived.group_velocity;
    s.paraxiality = p.q() * std::sqrt(p.theta_pump.norm2()) / s.derived.k0;
    try {
      s.deflection = deflection_prediction(p);
    } catch (const PhysicsError&) {
      // only defined at delta = +/-gamma with a finite group velocity
    }
    out.push_back(s);
  }
  return out;
}

RunReport base_report(const ExperimentConfig& cfg) {
  RunReport report;
  report.name = cfg.name;
  report.config = cfg.raw;
  report.config_hash = cfg.content_hash;
  report.media = summarize_media(cfg);
  if (cfg.source) {
    if (const auto* g = std::get_if<GratingSource>(&cfg.source->shape)) {
      report.talbot_distance = talbot_distance(g->spec.period, cfg.wavelength);
    }
  }
  for (const auto& m : report.media) {
    if (m.paraxiality > 0.3) {
      report.warnings.push_back("medium '" + m.name + "': |q theta_pump| / k0 = " + csv_number(m.paraxiality) +
                                " exceeds 0.3, walk-off prediction is not paraxial");
    }
  }
  return report;
}

ComplexField build_source(const ExperimentConfig& cfg, const Grid2D& grid) {
  const SourceSpec& src = *cfg.source;
  ComplexField field = std::visit(
      [&](const auto& s) -> ComplexField {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GratingSource>) {
          return binary_grating(grid, s.spec);
        } else if constexpr (std::is_same_v<T, GaussianSource>) {
          return gaussian_beam(grid, s.waist, s.center, s.tilt, cfg.wavelength);
        } else if constexpr (std::is_same_v<T, PointSource>) {
          return point_source(grid, s.radius);
        } else {
          return apply_mask(grid, load_mask(s.path, s.pitch), s.resample);
        }
      },
      src.shape);
  if (src.iris) {
    double k_cut = 0.0;
    if (src.iris->k_cut) {
      k_cut = *src.iris->k_cut;
    } else {
      k_cut = *src.iris->k_cut_over_k0 * derived_quantities(cfg.media.at(src.iris->medium)).k0;
    }
    field = iris_filter(field, k_cut);
  }
  return field;
}

OpticalTrain build_train(const ExperimentConfig& cfg) {
  OpticalTrain train;
  for (std::size_t i = 0; i < cfg.train.size(); ++i) {
    const TrainEntry& e = cfg.train[i];
    if (e.medium == kFreeSpaceMedium) {
      train.segments.push_back({FreeSpace{cfg.wavelength}, e.length});
    } else {
      train.segments.push_back({EitMedium{cfg.media.at(e.medium)}, e.length});
    }
    if (e.snapshot) train.snapshot_after.push_back(i);
  }
  return train;
}

// exp[i chi_total(0) L] accumulated over the first `upto` segments.
Complex uniform_factor(const OpticalTrain& train, std::size_t upto) {
  Complex factor(1.0, 0.0);
  for (std::size_t i = 0; i < upto; ++i) {
    if (const auto* eit = std::get_if<EitMedium>(&train.segments[i].medium)) {
      factor *= std::exp(Complex(0.0, train.segments[i].length) * chi_total({0.0, 0.0}, eit->params));
    }
  }
  return factor;
}

ComplexField divided(ComplexField f, Complex factor) {
  for (auto& v : f.values()) v /= factor;
  return f;
}

double eit_length(const OpticalTrain& train) {
  double total = 0.0;
  for (const auto& s : train.segments) {
    if (std::holds_alternative<EitMedium>(s.medium)) total += s.length;
  }
  return total;
}

std::string table_name(const std::string& base, std::set<std::string>& used) {
  std::string name = base + ".csv";
  for (int i = 2; used.contains(name); ++i) name = base + "_" + std::to_string(i) + ".csv";
  used.insert(name);
  return name;
}

struct PendingTable {
  std::string file;
  std::vector<std::vector<std::string>> rows;
};

}  // namespace

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::optional<double> MeasurementResult::get(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::optional<double> RunReport::value(const std::string& type, const std::string& key) const {
  for (const auto& m : measurements) {
    if (m.type == type) return m.get(key);
  }
  return std::nullopt;
}

json RunReport::to_json() const {
  json j;
  j["name"] = name;
  j["config"] = config;
  j["config_hash"] = config_hash;
  json media_json = json::object();
  for (const auto& m : media) {
    json e;
    e["k0_per_m"] = m.derived.k0;
    e["group_velocity_m_per_s"] = optional_json(m.derived.group_velocity);
    e["group_delay_s"] = optional_json(m.group_delay);
    e["effective_index"] = optional_json(m.derived.effective_index);
    e["effective_index_singular"] = m.derived.effective_index_singular;
    e["length_m"] = m.length;
    e["paraxiality"] = m.paraxiality;
    if (m.deflection) {
      e["predicted_theta_probe_rad"] = {m.deflection->theta_probe.x, m.deflection->theta_probe.y};
    }
    media_json[m.name] = e;
  }
  j["media"] = media_json;
  j["talbot_distance_m"] = optional_json(talbot_distance);
  json ms = json::array();
  for (const auto& m : measurements) {
    json e;
    e["type"] = m.type;
    json values_json = json::object();
    for (const auto& [k, v] : m.values) values_json[k] = v;
    e["values"] = values_json;
    if (m.table) e["table"] = *m.table;
    ms.push_back(e);
  }
  j["measurements"] = ms;
  j["warnings"] = warnings;
  return j;
}

RunReport describe(const ExperimentConfig& config) { return base_report(config); }

std::string format_description(const RunReport& report) {
  std::ostringstream os;
  char buf[160];
  os << "experiment " << report.name << " (config " << report.config_hash << ")\n";
  for (const auto& m : report.media) {
    os << "medium " << m.name << ":\n";
    std::snprintf(buf, sizeof buf, "  k0                = %.4g mm^-1\n", m.derived.k0 * 1e-3);
    os << buf;
    if (m.derived.group_velocity) {
      std::snprintf(buf, sizeof buf, "  group velocity    = %.5g m/s\n", *m.derived.group_velocity);
      os << buf;
      std::snprintf(buf, sizeof buf, "  group delay       = %.5g us over %.5g mm\n", *m.group_delay * 1e6,
                    m.length * 1e3);
      os << buf;
      if (m.derived.effective_index_singular) {
        os << "  effective index   = singular (diffraction eliminated)\n";
      } else {
        std::snprintf(buf, sizeof buf, "  effective index   = %.5g\n", *m.derived.effective_index);
        os << buf;
      }
    } else {
      os << "  group velocity    = unavailable (alpha * gamma_p = 0)\n";
    }
    std::snprintf(buf, sizeof buf, "  |q theta_pump|/k0 = %.4g\n", m.paraxiality);
    os << buf;
    if (m.deflection) {
      std::snprintf(buf, sizeof buf, "  predicted walk-off = (%.5g, %.5g) mrad\n", m.deflection->theta_probe.x * 1e3,
                    m.deflection->theta_probe.y * 1e3);
      os << buf;
    }
  }
  if (report.talbot_distance) {
    std::snprintf(buf, sizeof buf, "talbot distance     = %.5g mm\n", *report.talbot_distance * 1e3);
    os << buf;
  }
  for (const auto& w : report.warnings) os << "warning: " << w << '\n';
  return os.str();
}

RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, TransferCache* cache) {
  RunReport report = base_report(cfg);
  std::set<std::string> used_tables;
  std::vector<PendingTable> tables;

  std::optional<ComplexField> source;
  std::optional<ComplexField> raw_output;
  std::optional<ComplexField> output;
  std::vector<Snapshot> snapshots;
  OpticalTrain train;

  if (cfg.source) {
    const Grid2D grid = cfg.grid.make();
    source = build_source(cfg, grid);
    train = build_train(cfg);
    TransferCache local_cache;
    TrainResult result = run_train(*source, train, cache != nullptr ? cache : &local_cache);
    raw_output = result.output;
    if (cfg.normalize_loss) {
      output = divided(result.output, uniform_factor(train, train.segments.size()));
      for (auto& s : result.snapshots) s.field = divided(s.field, uniform_factor(train, s.segment + 1));
    } else {
      output = result.output;
    }
    snapshots = std::move(result.snapshots);

    if (edge_energy_fraction(*source) > kWrapAroundThreshold) {
      report.warnings.push_back("source has power near the grid edge; FFT wrap-around likely");
    }
    if (edge_energy_fraction(*output) > kWrapAroundThreshold) {
      report.warnings.push_back("output has power near the grid edge; FFT wrap-around likely");
    }
  }

  for (const Measurement& meas : cfg.measurements) {
    MeasurementResult r;
    r.type = measurement_name(meas);
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, ContrastMeasurement>) {
            const auto& spec = std::get<GratingSource>(cfg.source->shape).spec;
            std::optional<AnalysisWindow> window;
            if (m.window_half_width) window = AnalysisWindow{*m.window_half_width, *m.window_half_width};
            const ContrastReport in = grating_contrast(intensity(*source), spec, window);
            const ContrastReport c = grating_contrast(intensity(*output), spec, window);
            r.values = {{"input_contrast", in.contrast},
                        {"mean_original", c.mean_original},
                        {"mean_reciprocal", c.mean_reciprocal},
                        {"contrast", c.contrast}};
          } else if constexpr (std::is_same_v<T, DeflectionMeasurement>) {
            double length = m.length.value_or(eit_length(train));
            if (!(length > 0.0)) length = train.total_length();
            const DeflectionReport d = deflection_measurement(*source, *output, length, cfg.wavelength);
            r.values = {{"length_m", length},
                        {"theta_probe_x_rad", d.theta_probe.x},
                        {"theta_probe_y_rad", d.theta_probe.y},
                        {"residual_tilt_x_rad", d.residual_tilt.x},
                        {"residual_tilt_y_rad", d.residual_tilt.y}};
          } else if constexpr (std::is_same_v<T, WidthsMeasurement>) {
            const IntensityMap in = intensity(*source);
            const IntensityMap out = intensity(*output);
            const Vec2 ci = centroid(in), co = centroid(out), wi = rms_width(in), wo = rms_width(out);
            r.values = {{"input_centroid_x_m", ci.x}, {"input_centroid_y_m", ci.y}, {"input_rms_x_m", wi.x},
                        {"input_rms_y_m", wi.y},      {"output_centroid_x_m", co.x}, {"output_centroid_y_m", co.y},
                        {"output_rms_x_m", wo.x},     {"output_rms_y_m", wo.y}};
          } else if constexpr (std::is_same_v<T, TransmissionMeasurement>) {
            r.values = {{"transmission", transmission(*source, *raw_output)}};
          } else if constexpr (std::is_same_v<T, TransmissionSweepMeasurement>) {
            const MediumParams& p = cfg.media.at(m.medium);
            const double length = m.length.value_or(cfg.medium_length(m.medium));
            std::vector<double> deltas;
            for (double f : m.delta_over_gamma) deltas.push_back(f * p.gamma);
            const auto spectrum = transmission_spectrum(p, deltas, length);
            PendingTable t{table_name("transmission_sweep", used_tables), {}};
            t.rows.push_back({"delta_over_gamma", "delta_rad_per_s", "transmission"});
            for (std::size_t i = 0; i < spectrum.size(); ++i) {
              t.rows.push_back({csv_number(m.delta_over_gamma[i]), csv_number(spectrum[i].delta),
                                csv_number(spectrum[i].transmission)});
            }
            r.values = {{"length_m", length}, {"points", static_cast<double>(spectrum.size())}};
            r.table = t.file;
            tables.push_back(std::move(t));
          } else if constexpr (std::is_same_v<T, ChiExportMeasurement>) {
            const MediumParams& p = cfg.media.at(m.medium);
            const double k0 = derived_quantities(p).k0;
            std::vector<double> ks, deltas;
            for (double f : m.k_over_k0) ks.push_back(f * k0);
            for (double f : m.delta_over_gamma) deltas.push_back(f * p.gamma);
            const auto samples = chi_curve_export(p, ks, deltas);
            PendingTable t{table_name("chi_curve", used_tables), {}};
            t.rows.push_back({"k_per_m", "k_over_k0", "delta_over_gamma", "re_chi_per_m", "im_chi_per_m"});
            for (const auto& s : samples) {
              t.rows.push_back({csv_number(s.k), csv_number(s.k / k0), csv_number(s.delta / p.gamma),
                                csv_number(s.chi.real()), csv_number(s.chi.imag())});
            }
            r.values = {{"k0_per_m", k0}, {"points", static_cast<double>(samples.size())}};
            r.table = t.file;
            tables.push_back(std::move(t));
          } else if constexpr (std::is_same_v<T, L2VsInputMeasurement>) {
            r.values = {{"relative_l2", relative_l2(*output, *source)}};
          } else {
            const ComplexField ref =
                propagate(*source, free_space_tf(source->grid(), 2.0 * std::numbers::pi / cfg.wavelength, m.length));
            r.values = {{"length_m", m.length}, {"relative_l2", relative_l2(*output, ref)}};
          }
        },
        meas);
    report.measurements.push_back(std::move(r));
  }

  // Everything is computed; only now touch the filesystem.
  ensure_dir(out_dir);
  if (source) {
    if (cfg.write_fields) {
      write_field(out_dir / "source.field", *source);
      write_field(out_dir / "output.field", *output);
      for (const auto& s : snapshots) {
        write_field(out_dir / ("snapshot_" + std::to_string(s.segment) + ".field"), s.field);
      }
    }
    write_intensity_pgm(out_dir / "source.pgm", *source);
    write_intensity_pgm(out_dir / "output.pgm", *output);
    if (const auto* g = std::get_if<GratingSource>(&cfg.source->shape)) {
      const auto in = cross_section(intensity(*source), g->spec.axis);
      const auto out = cross_section(intensity(*output), g->spec.axis);
      CsvWriter csv(out_dir / "cross_section.csv");
      csv.row({"coordinate_m", "input_intensity", "output_intensity"});
      for (std::size_t i = 0; i < in.size(); ++i) {
        csv.row({csv_number(in[i].first), csv_number(in[i].second), csv_number(out[i].second)});
      }
      csv.close();
    }
  }
  for (const auto& t : tables) {
    CsvWriter csv(out_dir / t.file);
    for (const auto& row : t.rows) csv.row(row);
    csv.close();
  }
  {
    CsvWriter csv(out_dir / "measurements.csv");
    csv.row({"measurement", "quantity", "value"});
    for (const auto& m : report.measurements) {
      for (const auto& [k, v] : m.values) csv.row({m.type, k, csv_number(v)});
    }
    csv.close();
  }
  {
    std::ofstream out(out_dir / "report.json", std::ios::trunc);
    if (!out) throw IoError("cannot write report.json");
    out << report.to_json().dump(2) << '\n';
    if (!out) throw IoError("failed writing report.json");
  }
  return report;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<double>& values, const std::filesystem::path& out_dir,
                                  std::size_t workers) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<ExperimentConfig> configs;
  configs.reserve(values.size());
  for (double v : values) {
    json tree = set_param(base.raw, param, v);
    tree.erase("sweep");
    configs.push_back(parse_config(tree, base.base_dir));
  }

  std::vector<std::optional<RunReport>> reports(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        char dir[32];
        std::snprintf(dir, sizeof dir, "point_%03zu", i);
        reports[i] = run_experiment(configs[i], out_dir / dir);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, values.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < values.size(); ++i) points.push_back({values[i], std::move(*reports[i])});

  std::vector<std::pair<std::string, std::string>> columns;
  for (const auto& m : points.front().report.measurements) {
    for (const auto& [k, v] : m.values) columns.emplace_back(m.type, k);
  }
  ensure_dir(out_dir);
  CsvWriter csv(out_dir / "sweep.csv");
  std::vector<std::string> header{param};
  for (const auto& [type, key] : columns) header.push_back(type + "." + key);
  csv.row(header);
  for (const auto& p : points) {
    std::vector<std::string> row{csv_number(p.value)};
    for (const auto& [type, key] : columns) {
      const auto v = p.report.value(type, key);
      row.push_back(v ? csv_number(*v) : "");
    }
    csv.row(row);
  }
  csv.close();
  return points;
}

}  // namespace eitprop
