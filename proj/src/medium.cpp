#include "eitprop/medium.hpp"

#include <cmath>
#include <numbers>

#include "eitprop/error.hpp"

namespace eitprop {
namespace {

constexpr double kDetuningTolerance = 1e-9;

bool finite(double v) { return std::isfinite(v); }

// +1 for delta = +gamma, -1 for delta = -gamma; throws otherwise.
int detuning_branch(const MediumParams& p) {
  const double tol = kDetuningTolerance * p.gamma;
  if (std::abs(p.delta - p.gamma) <= tol) return +1;
  if (std::abs(p.delta + p.gamma) <= tol) return -1;
  throw PhysicsError("quadratic expansion needs delta = +gamma or -gamma");
}

double require_group_velocity(const MediumParams& p) {
  const double denom = p.alpha * p.gamma_p;
  if (!(denom > 0.0)) throw PhysicsError("group velocity undefined: alpha * gamma_p must be positive");
  return p.gamma * p.gamma / denom;
}

}  // namespace

double MediumParams::q() const { return 2.0 * std::numbers::pi / wavelength; }

void validate(const MediumParams& p) {
  if (!(finite(p.diffusion) && p.diffusion > 0.0)) throw PhysicsError("diffusion coefficient must be positive");
  if (!(finite(p.gamma) && p.gamma > 0.0)) throw PhysicsError("gamma must be positive");
  if (!(finite(p.gamma_p) && p.gamma_p >= 0.0)) throw PhysicsError("gamma_p must be non-negative");
  if (!finite(p.delta)) throw PhysicsError("delta must be finite");
  if (!(finite(p.alpha) && p.alpha >= 0.0)) throw PhysicsError("alpha must be non-negative");
  if (!(finite(p.wavelength) && p.wavelength > 0.0)) throw PhysicsError("wavelength must be positive");
  if (!finite(p.theta_pump.x) || !finite(p.theta_pump.y)) throw PhysicsError("pump tilt must be finite");
}

Complex chi_eit(Vec2 k, const MediumParams& p) {
  const Vec2 rel = k - p.q() * p.theta_pump;
  const Complex denom(p.gamma + p.diffusion * rel.norm2(), -p.delta);
  return Complex(0.0, p.alpha) * (1.0 - p.gamma_p / denom);
}

Complex chi_total(Vec2 k, const MediumParams& p) { return chi_eit(k, p) - k.norm2() / (2.0 * p.q()); }

QuadraticCoeffs quadratic_coeffs(const MediumParams& p) {
  validate(p);
  const int branch = detuning_branch(p);
  const double vg = require_group_velocity(p);
  // d chi_eit / d(Dk^2) at the pump direction is i alpha gamma_p / (gamma - i delta)^2,
  // which is real and equal to -branch / (2 v_g) when delta = branch * gamma.
  return {chi_eit(p.q() * p.theta_pump, p), Complex(-branch * p.diffusion / (2.0 * vg), 0.0)};
}

DerivedQuantities derived_quantities(const MediumParams& p) {
  validate(p);
  DerivedQuantities out;
  out.k0 = std::sqrt(p.gamma / p.diffusion);
  if (p.alpha * p.gamma_p > 0.0) {
    const double vg = p.gamma * p.gamma / (p.alpha * p.gamma_p);
    out.group_velocity = vg;
    out.group_delay_per_length = 1.0 / vg;
    const double denom = 1.0 - p.q() * p.diffusion / vg;
    if (std::abs(denom) < 1e-12) {
      out.effective_index_singular = true;
    } else {
      out.effective_index = 1.0 / denom;
    }
  }
  return out;
}

double pump_power_for(double target_group_velocity, const MediumParams& p) {
  if (!(finite(target_group_velocity) && target_group_velocity > 0.0)) {
    throw PhysicsError("target group velocity must be positive");
  }
  if (!(p.alpha > 0.0)) throw PhysicsError("alpha must be positive to reach a finite group velocity");
  if (!(p.gamma > 0.0)) throw PhysicsError("gamma must be positive");
  return p.gamma * p.gamma / (p.alpha * target_group_velocity);
}

DeflectionPrediction deflection_prediction(const MediumParams& p) {
  validate(p);
  const int branch = detuning_branch(p);
  const double vg = require_group_velocity(p);
  const double gain = -branch * p.q() * p.diffusion / vg;
  DeflectionPrediction out;
  out.theta_probe = gain * p.theta_pump;
  const double k0 = std::sqrt(p.gamma / p.diffusion);
  out.paraxial_warning = p.q() * std::sqrt(p.theta_pump.norm2()) > 0.3 * k0;
  return out;
}

double group_delay(const MediumParams& p, double length) {
  if (!(finite(length) && length >= 0.0)) throw PhysicsError("length must be non-negative");
  return length / require_group_velocity(p);
}

}  // namespace eitprop
