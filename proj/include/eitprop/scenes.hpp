#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "eitprop/grid.hpp"
#include "eitprop/medium.hpp"

namespace eitprop {

/// Axis along which a line grating is periodic. kX: lines of constant x.
enum class GratingAxis { kX, kY };

struct GratingSpec {
  double period = 0.0;                        // a, meters
  double duty = 0.5;                          // bright fraction of each period
  GratingAxis axis = GratingAxis::kX;
  std::optional<double> envelope_half_width;  // super-Gaussian window, meters
};

inline constexpr int kEnvelopeOrder = 10;

/// Grayscale raster applied as field amplitude. Row 0 maps to the lowest y.
struct MaskImage {
  std::size_t width = 0;
  std::size_t height = 0;
  double pitch = 0.0;          // meters per mask pixel
  std::vector<double> values;  // row-major, in [0, 1]
};

enum class Resample { kNearest, kBilinear };

/// Largest fraction of the grid extent a mask may cover on either axis.
inline constexpr double kMaskMaxFill = 0.75;

/// exp(-r^2/w0^2) exp[i q (theta . r)], unit peak. Needs w0 >= 4 max(dx, dy).
ComplexField gaussian_beam(const Grid2D& grid, double w0, Vec2 center = {}, Vec2 tilt = {},
                           double wavelength = kRb87D1Wavelength);

/// Amplitude grating: 1 where |x - m a| < duty a / 2, else 0; bright lines are
/// centred on x = m a so analysis regions can be laid out from the GratingSpec alone.
ComplexField binary_grating(const Grid2D& grid, const GratingSpec& spec);

/// Envelope amplitude at (x, y); 1 when the GratingSpec has no envelope.
double grating_envelope(const GratingSpec& spec, double x, double y);

/// Top-hat disc of unit amplitude centred at the origin.
ComplexField point_source(const Grid2D& grid, double radius);

/// Reads a binary PGM (P5, 8- or 16-bit).
MaskImage load_mask(const std::filesystem::path& path, double pitch);

/// Resamples the mask, centred, onto the grid. Samples outside the mask are 0.
ComplexField apply_mask(const Grid2D& grid, const MaskImage& mask, Resample mode = Resample::kNearest);

/// Zeroes every spectral component with |k| > k_cut.
ComplexField iris_filter(const ComplexField& field, double k_cut);

}  // namespace eitprop
