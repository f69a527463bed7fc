#pragma once

#include <numbers>
#include <optional>

#include "eitprop/grid.hpp"

namespace eitprop {

inline constexpr double kRb87D1Wavelength = 794.979e-9;

/// Parameters of a uniform, buffer-gas EIT vapor cell.
///
/// Every rate (gamma, gamma_p, delta) is an angular frequency in rad/s; a
/// line-width quoted in Hz must be multiplied by 2 pi before it lands here.
/// alpha is the field absorption coefficient off the EIT window (intensity
/// attenuates as exp(-2 alpha z)).
struct MediumParams {
  double diffusion = 1.1e-3;           // D, m^2/s
  double gamma = 2.0 * std::numbers::pi * 70e3;  // EIT line-width, rad/s
  double gamma_p = 0.0;                // power broadening, rad/s
  double delta = 0.0;                  // Raman detuning, rad/s
  double alpha = 60.0;                 // 1/m
  double wavelength = kRb87D1Wavelength;
  Vec2 theta_pump{};                   // pump tilt, rad

  double q() const;

  friend bool operator==(const MediumParams&, const MediumParams&) = default;
};

/// Throws PhysicsError if any field is out of its physical range.
void validate(const MediumParams& p);

struct DerivedQuantities {
  double k0 = 0.0;                               // sqrt(gamma/D), 1/m
  std::optional<double> group_velocity;          // m/s, absent when alpha*gamma_p == 0
  std::optional<double> group_delay_per_length;  // s/m
  std::optional<double> effective_index;         // absent when singular or v_g unavailable
  bool effective_index_singular = false;         // qD/v_g == 1: diffraction eliminated
};

struct QuadraticCoeffs {
  Complex c0;  // chi_eit at the pump direction
  Complex c2;  // coefficient of |k - q theta_pump|^2, meters
};

struct DeflectionPrediction {
  Vec2 theta_probe{};
  bool paraxial_warning = false;  // |q theta_pump| > 0.3 k0
};

/// EIT contribution i alpha (1 - gamma_p / (gamma + D|k - q theta_pump|^2 - i delta)).
Complex chi_eit(Vec2 k, const MediumParams& p);

/// chi_eit(k) - |k|^2/(2q). The free-space term always uses the untilted k.
Complex chi_total(Vec2 k, const MediumParams& p);

/// Quadratic expansion of chi_eit about the pump direction, valid at delta = +/-gamma.
QuadraticCoeffs quadratic_coeffs(const MediumParams& p);

DerivedQuantities derived_quantities(const MediumParams& p);

/// Pump broadening that yields the requested group velocity at fixed gamma, alpha.
double pump_power_for(double target_group_velocity, const MediumParams& p);

/// Walk-off angle of the probe envelope under a tilted pump at delta = +/-gamma.
DeflectionPrediction deflection_prediction(const MediumParams& p);

/// length / v_g, seconds.
double group_delay(const MediumParams& p, double length);

}  // namespace eitprop
