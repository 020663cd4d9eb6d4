#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "units.hpp"

namespace cavmag {

/// Frequencies, decay rates and couplings of the cavity + two-magnon system.
/// All members are in internal units (see units.hpp). Decay rates are amplitude
/// decay rates: they enter the Langevin equations as -kappa with input
/// coupling sqrt(2 kappa).
struct SystemParams {
    double omega_a = 0.0;
    double omega_m1 = 0.0;
    double omega_m2 = 0.0;
    double omega_s = 0.0;
    double kappa_a = 0.0;
    double kappa_m1 = 0.0;
    double kappa_m2 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
};

/// Throws DomainError naming the first violated invariant.
inline void validate(const SystemParams& p) {
    if (!(p.kappa_a > 0.0) || !(p.kappa_m1 > 0.0) || !(p.kappa_m2 > 0.0))
        throw DomainError("decay rates must be strictly positive");
    if (!(p.g1 >= 0.0) || !(p.g2 >= 0.0))
        throw DomainError("couplings must be non-negative");
    if (!(p.omega_a >= 0.0) || !(p.omega_m1 >= 0.0) || !(p.omega_m2 >= 0.0) ||
        !(p.omega_s >= 0.0))
        throw DomainError("frequencies must be non-negative");
}

/// Detunings from the squeezed-vacuum carrier, internal units.
struct Detunings {
    double delta_a = 0.0;
    double delta_m1 = 0.0;
    double delta_m2 = 0.0;
};

inline Detunings detunings_from(const SystemParams& p) {
    return {p.omega_a - p.omega_s, p.omega_m1 - p.omega_s, p.omega_m2 - p.omega_s};
}

/// Squeezing parameter and phase of the input squeezed vacuum.
/// The phase is kept reduced to [0, 2pi).
class DriveParams {
public:
    DriveParams() = default;
    DriveParams(double r, double theta) : r_(r), theta_(reduce_phase(theta)) {
        if (!(r >= 0.0) || !std::isfinite(r))
            throw DomainError("squeezing parameter r must be finite and >= 0");
    }

    double r() const { return r_; }
    double theta() const { return theta_; }

    /// Mean photon number of the squeezed bath, sinh^2 r.
    double bath_n() const { return std::sinh(r_) * std::sinh(r_); }
    /// |M| = sinh r cosh r; the anomalous moment is M = |M| e^{i theta}.
    double bath_m_abs() const { return std::sinh(r_) * std::cosh(r_); }

    static double reduce_phase(double theta) {
        if (!std::isfinite(theta)) throw DomainError("squeezing phase must be finite");
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double t = std::fmod(theta, two_pi);
        if (t < 0.0) t += two_pi;
        // fmod of a tiny negative number can round up to exactly 2pi
        if (t >= two_pi) t = 0.0;
        return t;
    }

private:
    double r_ = 0.0;
    double theta_ = 0.0;
};

/// Bose-Einstein occupation [exp(hbar omega / kB T) - 1]^-1.
/// omega in rad/s, temperature in K. Exactly 0 at T = 0.
inline double thermal_occupation(double omega_rad_s, double temperature_k) {
    if (!(omega_rad_s > 0.0))
        throw DomainError("thermal occupation is undefined for non-positive frequency");
    if (!(temperature_k >= 0.0))
        throw DomainError("temperature must be non-negative");
    if (temperature_k == 0.0) return 0.0;
    const double x = units::kHbar * omega_rad_s / (units::kBoltzmann * temperature_k);
    // expm1 overflows to +inf for x > ~709, giving an exact 0 instead of NaN
    return 1.0 / std::expm1(x);
}

/// Bath temperature and the resulting thermal magnon occupations.
class Environment {
public:
    Environment() = default;

    /// Occupations follow from the magnon frequencies in `p`.
    static Environment at(double temperature_k, const SystemParams& p) {
        if (!(temperature_k >= 0.0)) throw DomainError("temperature must be non-negative");
        if (temperature_k == 0.0) return Environment(0.0, 0.0, 0.0);
        return Environment(temperature_k,
                           thermal_occupation(units::internal_to_rad_per_s(p.omega_m1), temperature_k),
                           thermal_occupation(units::internal_to_rad_per_s(p.omega_m2), temperature_k));
    }

    /// Explicit occupations, bypassing the Bose-Einstein formula.
    static Environment with_occupations(double temperature_k, double n_m1, double n_m2) {
        if (!(temperature_k >= 0.0)) throw DomainError("temperature must be non-negative");
        if (!(n_m1 >= 0.0) || !(n_m2 >= 0.0)) throw DomainError("occupations must be non-negative");
        return Environment(temperature_k, n_m1, n_m2);
    }

    double temperature() const { return temperature_; }
    double n_m1() const { return n_m1_; }
    double n_m2() const { return n_m2_; }

private:
    Environment(double t, double n1, double n2) : temperature_(t), n_m1_(n1), n_m2_(n2) {}

    double temperature_ = 0.0;
    double n_m1_ = 0.0;
    double n_m2_ = 0.0;
};

struct ModelDefaults {
    SystemParams params;
    Environment env;
};

/// Reference configuration: omega_a/2pi = 10 GHz, kappa_a/2pi = 5 MHz,
/// kappa_m = kappa_a/5, g1 = g2 = 4 kappa_a, T = 20 mK, everything resonant
/// with the drive.
inline ModelDefaults reference_defaults() {
    SystemParams p;
    p.omega_a = units::hz_to_internal(10.0e9);
    p.omega_m1 = p.omega_a;
    p.omega_m2 = p.omega_a;
    p.omega_s = p.omega_a;
    p.kappa_a = units::hz_to_internal(5.0e6);
    p.kappa_m1 = p.kappa_a / 5.0;
    p.kappa_m2 = p.kappa_a / 5.0;
    p.g1 = 4.0 * p.kappa_a;
    p.g2 = 4.0 * p.kappa_a;
    return {p, Environment::at(0.020, p)};
}

}  // namespace cavmag
