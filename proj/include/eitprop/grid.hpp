#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eitprop {

using Complex = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
  double norm2() const { return x * x + y * y; }
};

/// Uniform 2D sampling grid with the origin at the centre sample.
///
/// Real-space sample (ix, iy) sits at x = (ix - nx/2)*dx, y = (iy - ny/2)*dy
/// (integer division), so even sizes span [-Lx/2, Lx/2). Spectral samples are
/// stored in natural FFT order; kx(i) and ky(j) return the signed physical
/// wave-number, with the Nyquist sample reported as +pi/dx.
class Grid2D {
 public:
  Grid2D(std::size_t nx, std::size_t ny, double dx, double dy);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double extent_x() const { return static_cast<double>(nx_) * dx_; }
  double extent_y() const { return static_cast<double>(ny_) * dy_; }
  double dkx() const;
  double dky() const;

  double x(std::size_t ix) const;
  double y(std::size_t iy) const;
  double kx(std::size_t ix) const;
  double ky(std::size_t iy) const;

  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx_ + ix; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  std::size_t nx_;
  std::size_t ny_;
  double dx_;
  double dy_;
};

Grid2D make_grid(std::size_t nx, std::size_t ny, double dx, double dy);

/// Complex envelope E(x, y) sampled row-major (x fastest).
class ComplexField {
 public:
  explicit ComplexField(Grid2D grid);
  ComplexField(Grid2D grid, std::vector<Complex> values);

  const Grid2D& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  const Complex& operator()(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }
  Complex& operator()(std::size_t ix, std::size_t iy) { return values_[grid_.index(ix, iy)]; }

  /// Sum |E|^2 dx dy, accumulated in storage order.
  double power() const;

 private:
  Grid2D grid_;
  std::vector<Complex> values_;
};

/// Transverse spectrum E~(kx, ky) in natural FFT order.
class SpectralField {
 public:
  explicit SpectralField(Grid2D grid);
  SpectralField(Grid2D grid, std::vector<Complex> values);

  const Grid2D& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  const Complex& operator()(std::size_t ix, std::size_t iy) const { return values_[grid_.index(ix, iy)]; }
  Complex& operator()(std::size_t ix, std::size_t iy) { return values_[grid_.index(ix, iy)]; }

  /// Sum |E~|^2 dkx dky / (2 pi)^2; equals ComplexField::power of the pair.
  double power() const;

 private:
  Grid2D grid_;
  std::vector<Complex> values_;
};

// Transform convention: E~(k) = dx dy sum_x E(x) exp(-i k.x) with x measured
// from the grid origin, and the matching inverse. This is the Riemann-sum
// approximation of the continuous Fourier transform, so Parseval holds as
//   sum |E|^2 dx dy = sum |E~|^2 dkx dky / (2 pi)^2.
SpectralField to_spectrum(const ComplexField& field);
ComplexField from_spectrum(const SpectralField& spectrum);

/// kx^2 + ky^2 per spectral sample, natural FFT order.
std::vector<double> spectral_k_squared(const Grid2D& grid);

}  // namespace eitprop
