#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "eitprop/grid.hpp"
#include "eitprop/medium.hpp"
#include "eitprop/scenes.hpp"

namespace eitprop {

struct IntensityMap {
  Grid2D grid;
  std::vector<double> values;  // |E|^2, row-major
};

IntensityMap intensity(const ComplexField& field);

/// Centred rectangle |x| <= half_x, |y| <= half_y. Defaults to the whole grid.
struct AnalysisWindow {
  double half_x = std::numeric_limits<double>::infinity();
  double half_y = std::numeric_limits<double>::infinity();

  bool contains(double x, double y) const { return std::abs(x) <= half_x && std::abs(y) <= half_y; }
};

struct ContrastReport {
  double mean_original = 0.0;    // <I_o>
  double mean_reciprocal = 0.0;  // <I_n>
  double contrast = 0.0;         // (I_o - I_n) / (I_o + I_n)
  AnalysisWindow window;
  double region_half_width = 0.0;
  std::size_t original_samples = 0;
  std::size_t reciprocal_samples = 0;
};

struct DeflectionReport {
  Vec2 input_centroid;
  Vec2 output_centroid;
  Vec2 theta_probe;    // centroid displacement / L
  Vec2 residual_tilt;  // (output - input spectral centroid) / q
};

struct TransmissionPoint {
  double delta = 0.0;  // rad/s
  double transmission = 0.0;
};

struct ChiSample {
  double k = 0.0;      // along x, 1/m
  double delta = 0.0;  // rad/s
  Complex chi;
};

inline constexpr double kContrastWindowFraction = 0.6;

double talbot_distance(double period, double wavelength);

/// Window used by grating_contrast when the caller gives none: the central
/// 60% of the envelope, or of the grid when the grating has no envelope.
AnalysisWindow default_contrast_window(const Grid2D& grid, const GratingSpec& spec);

/// Mean intensity over stripes of width duty*a/2 centred on the original
/// bright lines (x = m a) versus the original dark-line centres (x = (m+1/2) a).
ContrastReport grating_contrast(const IntensityMap& intensity, const GratingSpec& spec,
                                std::optional<AnalysisWindow> window = std::nullopt);

Vec2 centroid(const IntensityMap& intensity, const AnalysisWindow& window = {});
Vec2 rms_width(const IntensityMap& intensity, const AnalysisWindow& window = {});

/// Intensity-weighted mean of (kx, ky) over |E~|^2.
Vec2 spectral_centroid(const ComplexField& field);

DeflectionReport deflection_measurement(const ComplexField& input, const ComplexField& output, double length,
                                        double wavelength);

double transmission(const ComplexField& input, const ComplexField& output);

/// Plane-wave transmission exp(-2 Im chi_total(0) L) for each detuning.
std::vector<TransmissionPoint> transmission_spectrum(const MediumParams& base, const std::vector<double>& deltas,
                                                     double length);

std::vector<ChiSample> chi_curve_export(const MediumParams& p, const std::vector<double>& ks,
                                        const std::vector<double>& deltas);

/// Quadratic Taylor coefficient f''(center)/2 of a sampled function by central
/// differences, Richardson-extrapolated once. Throws if the step is outside
/// the asymptotic regime.
Complex fd_taylor_c2(const std::function<Complex(double)>& sampler, double center, double step);

/// ||a - b|| / ||b|| over all samples.
double relative_l2(const ComplexField& a, const ComplexField& b);

/// Intensity along one axis through the grid centre: (coordinate, I) pairs.
std::vector<std::pair<double, double>> cross_section(const IntensityMap& intensity, GratingAxis axis);

}  // namespace eitprop
