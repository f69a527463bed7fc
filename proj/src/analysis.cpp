#include "eitprop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eitprop/error.hpp"

namespace eitprop {
namespace {

struct Moments {
  double weight = 0.0;
  double mx = 0.0;
  double my = 0.0;
};

Moments first_moments(const IntensityMap& map, const AnalysisWindow& window) {
  const Grid2D& g = map.grid;
  Moments m;
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const double y = g.y(iy);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double x = g.x(ix);
      if (!window.contains(x, y)) continue;
      const double w = map.values[g.index(ix, iy)];
      m.weight += w;
      m.mx += w * x;
      m.my += w * y;
    }
  }
  if (!(m.weight > 0.0)) throw PhysicsError("intensity has zero power inside the analysis window");
  m.mx /= m.weight;
  m.my /= m.weight;
  return m;
}

}  // namespace

IntensityMap intensity(const ComplexField& field) {
  IntensityMap map{field.grid(), std::vector<double>(field.values().size())};
  for (std::size_t i = 0; i < map.values.size(); ++i) map.values[i] = std::norm(field.values()[i]);
  return map;
}

double talbot_distance(double period, double wavelength) {
  if (!(period > 0.0) || !(wavelength > 0.0)) throw PhysicsError("Talbot distance needs positive period and wavelength");
  return 2.0 * period * period / wavelength;
}

AnalysisWindow default_contrast_window(const Grid2D& grid, const GratingSpec& spec) {
  if (spec.envelope_half_width) {
    const double h = kContrastWindowFraction * *spec.envelope_half_width;
    return {h, h};
  }
  return {kContrastWindowFraction * 0.5 * grid.extent_x(), kContrastWindowFraction * 0.5 * grid.extent_y()};
}

ContrastReport grating_contrast(const IntensityMap& map, const GratingSpec& spec, std::optional<AnalysisWindow> window) {
  if (!(spec.period > 0.0) || !(spec.duty > 0.0 && spec.duty <= 1.0)) throw PhysicsError("invalid grating spec");
  ContrastReport report;
  report.window = window.value_or(default_contrast_window(map.grid, spec));
  const double span = spec.axis == GratingAxis::kX ? report.window.half_x : report.window.half_y;
  if (2.0 * span < 3.0 * spec.period) throw PhysicsError("contrast window must cover at least 3 grating periods");
  report.region_half_width = 0.25 * spec.duty * spec.period;

  const Grid2D& g = map.grid;
  double sum_o = 0.0;
  double sum_n = 0.0;
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const double y = g.y(iy);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double x = g.x(ix);
      if (!report.window.contains(x, y)) continue;
      const double s = spec.axis == GratingAxis::kX ? x : y;
      const double to_line = std::abs(s - spec.period * std::round(s / spec.period));
      const double to_gap = std::abs(s - spec.period * (std::floor(s / spec.period) + 0.5));
      const double v = map.values[g.index(ix, iy)];
      if (to_line < report.region_half_width) {
        sum_o += v;
        ++report.original_samples;
      } else if (to_gap < report.region_half_width) {
        sum_n += v;
        ++report.reciprocal_samples;
      }
    }
  }
  if (report.original_samples == 0 || report.reciprocal_samples == 0) {
    throw PhysicsError("contrast regions contain no grid samples");
  }
  report.mean_original = sum_o / static_cast<double>(report.original_samples);
  report.mean_reciprocal = sum_n / static_cast<double>(report.reciprocal_samples);
  const double total = report.mean_original + report.mean_reciprocal;
  if (!(total > 0.0)) throw PhysicsError("zero intensity in contrast regions");
  report.contrast = (report.mean_original - report.mean_reciprocal) / total;
  return report;
}

Vec2 centroid(const IntensityMap& map, const AnalysisWindow& window) {
  const Moments m = first_moments(map, window);
  return {m.mx, m.my};
}

Vec2 rms_width(const IntensityMap& map, const AnalysisWindow& window) {
  const Moments m = first_moments(map, window);
  const Grid2D& g = map.grid;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const double y = g.y(iy);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double x = g.x(ix);
      if (!window.contains(x, y)) continue;
      const double w = map.values[g.index(ix, iy)];
      sxx += w * (x - m.mx) * (x - m.mx);
      syy += w * (y - m.my) * (y - m.my);
    }
  }
  return {std::sqrt(sxx / m.weight), std::sqrt(syy / m.weight)};
}

Vec2 spectral_centroid(const ComplexField& field) {
  const SpectralField s = to_spectrum(field);
  const Grid2D& g = field.grid();
  double w = 0.0;
  double kx = 0.0;
  double ky = 0.0;
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double p = std::norm(s(ix, iy));
      w += p;
      kx += p * g.kx(ix);
      ky += p * g.ky(iy);
    }
  }
  if (!(w > 0.0)) throw PhysicsError("spectral centroid of a zero field");
  return {kx / w, ky / w};
}

DeflectionReport deflection_measurement(const ComplexField& input, const ComplexField& output, double length,
                                        double wavelength) {
  if (!(input.grid() == output.grid())) throw PhysicsError("input and output fields live on different grids");
  if (!(length > 0.0)) throw PhysicsError("deflection needs a positive propagation length");
  DeflectionReport r;
  r.input_centroid = centroid(intensity(input));
  r.output_centroid = centroid(intensity(output));
  r.theta_probe = (1.0 / length) * (r.output_centroid - r.input_centroid);
  const double q = 2.0 * std::numbers::pi / wavelength;
  r.residual_tilt = (1.0 / q) * (spectral_centroid(output) - spectral_centroid(input));
  return r;
}

double transmission(const ComplexField& input, const ComplexField& output) {
  const double pin = input.power();
  if (!(pin > 0.0)) throw PhysicsError("transmission of a zero-power input");
  return output.power() / pin;
}

std::vector<TransmissionPoint> transmission_spectrum(const MediumParams& base, const std::vector<double>& deltas,
                                                     double length) {
  if (!(std::isfinite(length) && length >= 0.0)) throw PhysicsError("length must be non-negative");
  std::vector<TransmissionPoint> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    MediumParams p = base;
    p.delta = delta;
    validate(p);
    out.push_back({delta, std::exp(-2.0 * chi_total({0.0, 0.0}, p).imag() * length)});
  }
  return out;
}

std::vector<ChiSample> chi_curve_export(const MediumParams& base, const std::vector<double>& ks,
                                        const std::vector<double>& deltas) {
  std::vector<ChiSample> out;
  out.reserve(ks.size() * deltas.size());
  for (double delta : deltas) {
    MediumParams p = base;
    p.delta = delta;
    validate(p);
    for (double k : ks) {
      if (!std::isfinite(k)) throw PhysicsError("non-finite k in chi export");
      out.push_back({k, delta, chi_total({k, 0.0}, p)});
    }
  }
  return out;
}

Complex fd_taylor_c2(const std::function<Complex(double)>& sampler, double center, double step) {
  if (!(std::isfinite(step) && step > 0.0)) throw PhysicsError("finite-difference step must be positive");
  const Complex f0 = sampler(center);
  double fmax = std::abs(f0);
  auto second = [&](double h) {
    const Complex fp = sampler(center + h);
    const Complex fm = sampler(center - h);
    fmax = std::max({fmax, std::abs(fp), std::abs(fm)});
    return (fp - 2.0 * f0 + fm) / (2.0 * h * h);
  };
  const Complex c1 = second(step);
  const Complex c2 = second(0.5 * step);
  const Complex c4 = second(0.25 * step);
  const Complex r1 = (4.0 * c2 - c1) / 3.0;
  const Complex r2 = (4.0 * c4 - c2) / 3.0;
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * fmax / (step * step);
  if (std::abs(r1 - r2) > 0.25 * std::abs(c1 - c2) + floor) {
    throw PhysicsError("finite-difference step too large: second differences are not converging");
  }
  return r1;
}

double relative_l2(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw PhysicsError("fields live on different grids");
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    diff += std::norm(a.values()[i] - b.values()[i]);
    ref += std::norm(b.values()[i]);
  }
  if (!(ref > 0.0)) throw PhysicsError("relative L2 against a zero field");
  return std::sqrt(diff / ref);
}

std::vector<std::pair<double, double>> cross_section(const IntensityMap& map, GratingAxis axis) {
  const Grid2D& g = map.grid;
  std::vector<std::pair<double, double>> out;
  if (axis == GratingAxis::kX) {
    const std::size_t iy = g.ny() / 2;
    for (std::size_t ix = 0; ix < g.nx(); ++ix) out.emplace_back(g.x(ix), map.values[g.index(ix, iy)]);
  } else {
    const std::size_t ix = g.nx() / 2;
    for (std::size_t iy = 0; iy < g.ny(); ++iy) out.emplace_back(g.y(iy), map.values[g.index(ix, iy)]);
  }
  return out;
}

}  // namespace eitprop
