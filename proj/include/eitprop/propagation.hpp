#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <variant>
#include <vector>

#include "eitprop/grid.hpp"
#include "eitprop/medium.hpp"

namespace eitprop {

struct FreeSpace {
  double wavelength = kRb87D1Wavelength;
  double q() const;

  friend bool operator==(const FreeSpace&, const FreeSpace&) = default;
};

struct EitMedium {
  MediumParams params;

  friend bool operator==(const EitMedium&, const EitMedium&) = default;
};

using MediumSpec = std::variant<FreeSpace, EitMedium>;

/// H(k) = exp[i chi(k) L] sampled on a grid's spectral axes (natural FFT order).
class TransferFunction {
 public:
  TransferFunction(Grid2D grid, MediumSpec medium, double length, std::vector<Complex> h);

  const Grid2D& grid() const { return grid_; }
  const MediumSpec& medium() const { return medium_; }
  double length() const { return length_; }
  std::span<const Complex> values() const { return h_; }

 private:
  Grid2D grid_;
  MediumSpec medium_;
  double length_;
  std::vector<Complex> h_;
};

/// exp[-i k^2 L / (2q)]. Negative L back-propagates.
TransferFunction free_space_tf(const Grid2D& grid, double q, double length);

/// exp[i chi_total(k) L] at every grid sample, no paraxial truncation. L >= 0.
TransferFunction eit_tf(const Grid2D& grid, const MediumParams& p, double length);

TransferFunction make_tf(const Grid2D& grid, const MediumSpec& medium, double length);

ComplexField propagate(const ComplexField& field, const TransferFunction& tf);

struct Segment {
  MediumSpec medium;
  double length = 0.0;
};

struct OpticalTrain {
  std::vector<Segment> segments;
  std::vector<std::size_t> snapshot_after;  // segment indices, field recorded after each

  double total_length() const;
};

struct Snapshot {
  std::size_t segment = 0;
  ComplexField field;
};

struct TrainResult {
  ComplexField output;
  std::vector<Snapshot> snapshots;
};

/// Memoizes transfer functions by (grid, medium, length). Thread-safe.
class TransferCache {
 public:
  std::shared_ptr<const TransferFunction> get(const Grid2D& grid, const MediumSpec& medium, double length);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::shared_ptr<const TransferFunction>> entries_;
};

TrainResult run_train(const ComplexField& field, const OpticalTrain& train, TransferCache* cache = nullptr);

/// Divides out exp[i chi_total(0) L]: the k-independent loss and phase of a slab.
ComplexField normalize_uniform_loss(const ComplexField& field, const MediumParams& p, double length);

/// Fraction of the power within `margin` samples of any grid edge.
double edge_energy_fraction(const ComplexField& field, std::size_t margin = 2);

inline constexpr double kWrapAroundThreshold = 1e-6;

}  // namespace eitprop
