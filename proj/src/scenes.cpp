#include "eitprop/scenes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "eitprop/error.hpp"

namespace eitprop {
namespace {

double max_spacing(const Grid2D& g) { return std::max(g.dx(), g.dy()); }

void validate_grating(const Grid2D& grid, const GratingSpec& spec) {
  if (!(std::isfinite(spec.period) && spec.period > 0.0)) throw PhysicsError("grating period must be positive");
  if (!(spec.duty > 0.0 && spec.duty <= 1.0)) throw PhysicsError("grating duty cycle must be in (0, 1]");
  const double spacing = spec.axis == GratingAxis::kX ? grid.dx() : grid.dy();
  if (spec.period < 8.0 * spacing) throw PhysicsError("grating period must span at least 8 grid samples");
  if (spec.duty * spec.period <= spacing) throw PhysicsError("bright lines narrower than one grid sample");
  if (spec.envelope_half_width && !(*spec.envelope_half_width > 0.0)) {
    throw PhysicsError("grating envelope half-width must be positive");
  }
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  while (token.empty()) {
    const int c = in.get();
    if (c == EOF) throw IoError("truncated PGM header");
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (!std::isspace(c)) {
      token.push_back(static_cast<char>(c));
      while (in.peek() != EOF && !std::isspace(in.peek())) token.push_back(static_cast<char>(in.get()));
    }
  }
  return token;
}

std::size_t parse_header_number(std::istream& in) {
  const std::string token = header_token(in);
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(token, &pos);
  } catch (const std::exception&) {
    throw IoError("malformed PGM header value '" + token + "'");
  }
  if (pos != token.size()) throw IoError("malformed PGM header value '" + token + "'");
  return value;
}

}  // namespace

ComplexField gaussian_beam(const Grid2D& grid, double w0, Vec2 center, Vec2 tilt, double wavelength) {
  if (!(std::isfinite(w0) && w0 >= 4.0 * max_spacing(grid))) {
    throw PhysicsError("beam waist must be at least 4 grid samples");
  }
  if (std::abs(center.x) + 3.0 * w0 > 0.5 * grid.extent_x() || std::abs(center.y) + 3.0 * w0 > 0.5 * grid.extent_y()) {
    throw PhysicsError("beam does not fit inside the grid guard band");
  }
  if (!(wavelength > 0.0)) throw PhysicsError("wavelength must be positive");
  const double q = 2.0 * std::numbers::pi / wavelength;
  ComplexField field(grid);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    const double y = grid.y(iy);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double x = grid.x(ix);
      const Vec2 r{x - center.x, y - center.y};
      const double amp = std::exp(-r.norm2() / (w0 * w0));
      const double phase = q * (tilt.x * x + tilt.y * y);
      field(ix, iy) = tilt == Vec2{} ? Complex(amp, 0.0) : std::polar(amp, phase);
    }
  }
  return field;
}

double grating_envelope(const GratingSpec& spec, double x, double y) {
  if (!spec.envelope_half_width) return 1.0;
  const double w = *spec.envelope_half_width;
  return std::exp(-std::pow(std::abs(x) / w, kEnvelopeOrder) - std::pow(std::abs(y) / w, kEnvelopeOrder));
}

ComplexField binary_grating(const Grid2D& grid, const GratingSpec& spec) {
  validate_grating(grid, spec);
  // Samples sitting exactly on a stripe edge are dark on every period.
  const double half_bright = 0.5 * spec.duty * spec.period - 1e-9 * spec.period;
  ComplexField field(grid);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    const double y = grid.y(iy);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double x = grid.x(ix);
      const double s = spec.axis == GratingAxis::kX ? x : y;
      const double offset = s - spec.period * std::round(s / spec.period);
      const bool bright = spec.duty >= 1.0 || std::abs(offset) < half_bright;
      field(ix, iy) = bright ? grating_envelope(spec, x, y) : 0.0;
    }
  }
  return field;
}

ComplexField point_source(const Grid2D& grid, double radius) {
  if (!(std::isfinite(radius) && radius >= 2.0 * max_spacing(grid))) {
    throw PhysicsError("point source radius must be at least 2 grid samples");
  }
  ComplexField field(grid);
  const double r2 = radius * radius;
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const Vec2 r{grid.x(ix), grid.y(iy)};
      if (r.norm2() <= r2) field(ix, iy) = 1.0;
    }
  }
  return field;
}

MaskImage load_mask(const std::filesystem::path& path, double pitch) {
  if (!(std::isfinite(pitch) && pitch > 0.0)) throw PhysicsError("mask pitch must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mask " + path.string());
  if (header_token(in) != "P5") throw IoError("mask is not a binary PGM (P5): " + path.string());
  const std::size_t width = parse_header_number(in);
  const std::size_t height = parse_header_number(in);
  const std::size_t maxval = parse_header_number(in);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) throw IoError("bad PGM header in " + path.string());
  in.get();  // single whitespace before the raster

  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(width * height * bytes_per);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw IoError("truncated PGM raster in " + path.string());
  }
  MaskImage mask{width, height, pitch, std::vector<double>(width * height)};
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    const unsigned level = bytes_per == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
    mask.values[i] = std::min(1.0, static_cast<double>(level) / static_cast<double>(maxval));
  }
  return mask;
}

ComplexField apply_mask(const Grid2D& grid, const MaskImage& mask, Resample mode) {
  if (mask.width == 0 || mask.height == 0 || mask.values.size() != mask.width * mask.height) {
    throw PhysicsError("mask raster is empty or inconsistent");
  }
  if (!(mask.pitch > 0.0)) throw PhysicsError("mask pitch must be positive");
  const double mw = static_cast<double>(mask.width) * mask.pitch;
  const double mh = static_cast<double>(mask.height) * mask.pitch;
  if (mw > kMaskMaxFill * grid.extent_x() || mh > kMaskMaxFill * grid.extent_y()) {
    throw PhysicsError("mask is larger than the guard-banded grid");
  }

  auto texel = [&](long col, long row) -> double {
    if (col < 0 || row < 0 || col >= static_cast<long>(mask.width) || row >= static_cast<long>(mask.height)) return 0.0;
    return mask.values[static_cast<std::size_t>(row) * mask.width + static_cast<std::size_t>(col)];
  };

  ComplexField field(grid);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    // Continuous mask coordinates, pixel centres at integer + 0.5.
    const double v = grid.y(iy) / mask.pitch + 0.5 * static_cast<double>(mask.height);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double u = grid.x(ix) / mask.pitch + 0.5 * static_cast<double>(mask.width);
      double amp = 0.0;
      if (mode == Resample::kNearest) {
        amp = texel(static_cast<long>(std::floor(u)), static_cast<long>(std::floor(v)));
      } else {
        const double fu = u - 0.5;
        const double fv = v - 0.5;
        const auto c0 = static_cast<long>(std::floor(fu));
        const auto r0 = static_cast<long>(std::floor(fv));
        const double tu = fu - static_cast<double>(c0);
        const double tv = fv - static_cast<double>(r0);
        amp = (1 - tu) * (1 - tv) * texel(c0, r0) + tu * (1 - tv) * texel(c0 + 1, r0) +
              (1 - tu) * tv * texel(c0, r0 + 1) + tu * tv * texel(c0 + 1, r0 + 1);
      }
      field(ix, iy) = amp;
    }
  }
  return field;
}

ComplexField iris_filter(const ComplexField& field, double k_cut) {
  if (!(k_cut > 0.0)) throw PhysicsError("iris cut-off must be positive");
  SpectralField spectrum = to_spectrum(field);
  const auto k2 = spectral_k_squared(field.grid());
  const double cut2 = k_cut * k_cut;
  auto s = spectrum.values();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (k2[i] > cut2) s[i] = 0.0;
  }
  return from_spectrum(spectrum);
}

}  // namespace eitprop
