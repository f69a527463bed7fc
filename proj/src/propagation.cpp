#include "eitprop/propagation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "eitprop/error.hpp"

namespace eitprop {
namespace {

void check_length(double length) {
  if (!std::isfinite(length)) throw PhysicsError("segment length must be finite");
}

}  // namespace

double FreeSpace::q() const { return 2.0 * std::numbers::pi / wavelength; }

TransferFunction::TransferFunction(Grid2D grid, MediumSpec medium, double length, std::vector<Complex> h)
    : grid_(grid), medium_(std::move(medium)), length_(length), h_(std::move(h)) {
  if (h_.size() != grid_.size()) throw PhysicsError("transfer function size does not match grid");
}

TransferFunction free_space_tf(const Grid2D& grid, double q, double length) {
  check_length(length);
  if (!(q > 0.0)) throw PhysicsError("wave-number q must be positive");
  const auto k2 = spectral_k_squared(grid);
  std::vector<Complex> h(grid.size());
  const double scale = -length / (2.0 * q);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::polar(1.0, scale * k2[i]);
  return TransferFunction(grid, FreeSpace{2.0 * std::numbers::pi / q}, length, std::move(h));
}

TransferFunction eit_tf(const Grid2D& grid, const MediumParams& p, double length) {
  check_length(length);
  if (length < 0.0) throw PhysicsError("cannot back-propagate through an absorbing EIT medium");
  validate(p);
  std::vector<Complex> h(grid.size());
  const Complex i_len(0.0, length);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    const double ky = grid.ky(iy);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      h[grid.index(ix, iy)] = std::exp(i_len * chi_total({grid.kx(ix), ky}, p));
    }
  }
  return TransferFunction(grid, EitMedium{p}, length, std::move(h));
}

TransferFunction make_tf(const Grid2D& grid, const MediumSpec& medium, double length) {
  if (const auto* fs = std::get_if<FreeSpace>(&medium)) return free_space_tf(grid, fs->q(), length);
  return eit_tf(grid, std::get<EitMedium>(medium).params, length);
}

ComplexField propagate(const ComplexField& field, const TransferFunction& tf) {
  if (!(field.grid() == tf.grid())) throw PhysicsError("field and transfer function live on different grids");
  SpectralField spectrum = to_spectrum(field);
  auto s = spectrum.values();
  const auto h = tf.values();
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= h[i];
  return from_spectrum(spectrum);
}

double OpticalTrain::total_length() const {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.length;
  return total;
}

std::shared_ptr<const TransferFunction> TransferCache::get(const Grid2D& grid, const MediumSpec& medium,
                                                           double length) {
  {
    std::lock_guard lock(mutex_);
    for (const auto& e : entries_) {
      if (e->grid() == grid && e->length() == length && e->medium() == medium) return e;
    }
  }
  // Built outside the lock; a concurrent duplicate is harmless.
  auto tf = std::make_shared<const TransferFunction>(make_tf(grid, medium, length));
  std::lock_guard lock(mutex_);
  entries_.push_back(tf);
  return tf;
}

std::size_t TransferCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

TrainResult run_train(const ComplexField& field, const OpticalTrain& train, TransferCache* cache) {
  if (train.segments.empty()) throw PhysicsError("optical train has no segments");
  for (std::size_t idx : train.snapshot_after) {
    if (idx >= train.segments.size()) throw PhysicsError("snapshot index " + std::to_string(idx) + " out of range");
  }
  for (const auto& seg : train.segments) {
    if (!std::isfinite(seg.length) || seg.length < 0.0) throw PhysicsError("segment length must be non-negative");
  }

  TrainResult result{field, {}};
  for (std::size_t i = 0; i < train.segments.size(); ++i) {
    const Segment& seg = train.segments[i];
    if (cache != nullptr) {
      result.output = propagate(result.output, *cache->get(field.grid(), seg.medium, seg.length));
    } else {
      result.output = propagate(result.output, make_tf(field.grid(), seg.medium, seg.length));
    }
    for (std::size_t idx : train.snapshot_after) {
      if (idx == i) result.snapshots.push_back({i, result.output});
    }
  }
  return result;
}

ComplexField normalize_uniform_loss(const ComplexField& field, const MediumParams& p, double length) {
  validate(p);
  if (!(std::isfinite(length) && length >= 0.0)) throw PhysicsError("length must be non-negative");
  const Complex factor = std::exp(Complex(0.0, length) * chi_total({0.0, 0.0}, p));
  ComplexField out = field;
  for (auto& v : out.values()) v /= factor;
  return out;
}

double edge_energy_fraction(const ComplexField& field, std::size_t margin) {
  const Grid2D& g = field.grid();
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t iy = 0; iy < g.ny(); ++iy) {
    const bool edge_row = iy < margin || iy + margin >= g.ny();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double e = std::norm(field(ix, iy));
      total += e;
      if (edge_row || ix < margin || ix + margin >= g.nx()) edge += e;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace eitprop
