#pragma once

#include <numbers>

// Internal unit conventions.
//
// Every frequency-like quantity (mode frequencies, detunings, decay rates,
// couplings) is stored as an angular frequency measured in units of
// 2*pi x 1 MHz, i.e. the internal number equals nu / 1 MHz where nu = omega / 2pi.
// With the reference parameters this keeps drift-matrix entries O(1)-O(10^2).
// Times are measured in the reciprocal unit 1 / (2*pi x 1 MHz).

namespace cavmag::units {

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
inline constexpr double kHzPerInternal = 1.0e6;       // nu in Hz of one internal unit
inline constexpr double kRadPerSecondPerInternal = 2.0 * std::numbers::pi * kHzPerInternal;

constexpr double hz_to_internal(double nu_hz) { return nu_hz / kHzPerInternal; }
constexpr double internal_to_hz(double w) { return w * kHzPerInternal; }
constexpr double internal_to_rad_per_s(double w) { return w * kRadPerSecondPerInternal; }
constexpr double rad_per_s_to_internal(double omega) { return omega / kRadPerSecondPerInternal; }

constexpr double seconds_to_internal(double t) { return t * kRadPerSecondPerInternal; }
constexpr double internal_to_seconds(double t) { return t / kRadPerSecondPerInternal; }

}  // namespace cavmag::units
