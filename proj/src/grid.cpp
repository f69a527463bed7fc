#include "eitprop/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "eitprop/error.hpp"
#include "fft.hpp"

namespace eitprop {
namespace {

// exp(2 pi i num/den), exact at quarter turns.
Complex unit_phase(std::size_t num, std::size_t den) {
  num %= den;
  if (num == 0) return {1.0, 0.0};
  if (4 * num == den) return {0.0, 1.0};
  if (2 * num == den) return {-1.0, 0.0};
  if (4 * num == 3 * den) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

// exp(+i k_m * c * d) for the centred origin c = n/2, per natural-order index m.
std::vector<Complex> origin_phase(std::size_t n) {
  std::vector<Complex> phase(n);
  const std::size_t c = n / 2;
  for (std::size_t m = 0; m < n; ++m) phase[m] = unit_phase(m * c, n);
  return phase;
}

double signed_frequency(std::size_t i, std::size_t n) {
  const auto half = static_cast<long long>(n / 2);
  auto m = static_cast<long long>(i);
  if (m > half) m -= static_cast<long long>(n);
  return static_cast<double>(m);
}

void check_size(const Grid2D& grid, std::size_t count) {
  if (count != grid.size()) {
    throw PhysicsError("field has " + std::to_string(count) + " samples, grid needs " +
                       std::to_string(grid.size()));
  }
}

}  // namespace

Grid2D::Grid2D(std::size_t nx, std::size_t ny, double dx, double dy) : nx_(nx), ny_(ny), dx_(dx), dy_(dy) {
  if (nx < 2 || ny < 2) throw PhysicsError("grid needs at least 2 samples per axis");
  if (!(std::isfinite(dx) && dx > 0.0) || !(std::isfinite(dy) && dy > 0.0)) {
    throw PhysicsError("grid spacing must be finite and positive");
  }
}

double Grid2D::dkx() const { return 2.0 * std::numbers::pi / extent_x(); }
double Grid2D::dky() const { return 2.0 * std::numbers::pi / extent_y(); }

double Grid2D::x(std::size_t ix) const {
  return (static_cast<double>(ix) - static_cast<double>(nx_ / 2)) * dx_;
}
double Grid2D::y(std::size_t iy) const {
  return (static_cast<double>(iy) - static_cast<double>(ny_ / 2)) * dy_;
}
double Grid2D::kx(std::size_t ix) const { return signed_frequency(ix, nx_) * dkx(); }
double Grid2D::ky(std::size_t iy) const { return signed_frequency(iy, ny_) * dky(); }

Grid2D make_grid(std::size_t nx, std::size_t ny, double dx, double dy) { return Grid2D(nx, ny, dx, dy); }

ComplexField::ComplexField(Grid2D grid) : grid_(grid), values_(grid.size()) {}

ComplexField::ComplexField(Grid2D grid, std::vector<Complex> values) : grid_(grid), values_(std::move(values)) {
  check_size(grid_, values_.size());
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw PhysicsError("field contains non-finite values");
  }
}

double ComplexField::power() const {
  double sum = 0.0;
  for (const auto& v : values_) sum += std::norm(v);
  return sum * grid_.dx() * grid_.dy();
}

SpectralField::SpectralField(Grid2D grid) : grid_(grid), values_(grid.size()) {}

SpectralField::SpectralField(Grid2D grid, std::vector<Complex> values) : grid_(grid), values_(std::move(values)) {
  check_size(grid_, values_.size());
}

double SpectralField::power() const {
  double sum = 0.0;
  for (const auto& v : values_) sum += std::norm(v);
  const double two_pi = 2.0 * std::numbers::pi;
  return sum * grid_.dkx() * grid_.dky() / (two_pi * two_pi);
}

SpectralField to_spectrum(const ComplexField& field) {
  const Grid2D& g = field.grid();
  std::vector<Complex> data(field.values().begin(), field.values().end());
  detail::fft2d(data, g.nx(), g.ny(), detail::FftDirection::kForward);

  const auto px = origin_phase(g.nx());
  const auto py = origin_phase(g.ny());
  const double scale = g.dx() * g.dy();
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const Complex row = scale * py[iy];
    Complex* line = data.data() + iy * g.nx();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) line[ix] *= row * px[ix];
  }
  return SpectralField(g, std::move(data));
}

ComplexField from_spectrum(const SpectralField& spectrum) {
  const Grid2D& g = spectrum.grid();
  std::vector<Complex> data(spectrum.values().begin(), spectrum.values().end());

  const auto px = origin_phase(g.nx());
  const auto py = origin_phase(g.ny());
  const double scale = 1.0 / (static_cast<double>(g.size()) * g.dx() * g.dy());
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const Complex row = scale * std::conj(py[iy]);
    Complex* line = data.data() + iy * g.nx();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) line[ix] *= row * std::conj(px[ix]);
  }
  detail::fft2d(data, g.nx(), g.ny(), detail::FftDirection::kBackward);
  return ComplexField(g, std::move(data));
}

std::vector<double> spectral_k_squared(const Grid2D& grid) {
  std::vector<double> k2(grid.size());
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    const double ky = grid.ky(iy);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const double kx = grid.kx(ix);
      k2[grid.index(ix, iy)] = kx * kx + ky * ky;
    }
  }
  return k2;
}

}  // namespace eitprop
