#pragma once

#include <array>
#include <charconv>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace cavmag {

// Plain-text configuration, one "key = value" pair per line, '#' starts a
// comment. Frequency keys are ordinary frequencies nu = omega/2pi in Hz.
//
//   omega_a_hz  omega_m1_hz  omega_m2_hz  omega_s_hz
//   kappa_a_hz  kappa_m1_hz  kappa_m2_hz  g1_hz  g2_hz
//   r  theta_rad  temperature_k
//
// Unset magnon and drive frequencies follow omega_a_hz, unset magnon decay
// rates follow kappa_a_hz / 5 and unset couplings follow 4 * kappa_a_hz.

inline constexpr std::array<std::string_view, 12> kConfigKeys = {
    "omega_a_hz", "omega_m1_hz", "omega_m2_hz", "omega_s_hz", "kappa_a_hz", "kappa_m1_hz",
    "kappa_m2_hz", "g1_hz", "g2_hz", "r", "theta_rad", "temperature_k"};

struct Config {
    double omega_a_hz = 10.0e9;
    std::optional<double> omega_m1_hz;
    std::optional<double> omega_m2_hz;
    std::optional<double> omega_s_hz;
    double kappa_a_hz = 5.0e6;
    std::optional<double> kappa_m1_hz;
    std::optional<double> kappa_m2_hz;
    std::optional<double> g1_hz;
    std::optional<double> g2_hz;
    double r = 2.0;
    double theta_rad = 0.0;
    double temperature_k = 0.020;

    /// Copy with every derived default made explicit, so that later edits to
    /// omega_a_hz or kappa_a_hz no longer move the dependent values.
    Config resolved() const {
        Config c = *this;
        c.omega_m1_hz = omega_m1_hz.value_or(omega_a_hz);
        c.omega_m2_hz = omega_m2_hz.value_or(omega_a_hz);
        c.omega_s_hz = omega_s_hz.value_or(omega_a_hz);
        c.kappa_m1_hz = kappa_m1_hz.value_or(kappa_a_hz / 5.0);
        c.kappa_m2_hz = kappa_m2_hz.value_or(kappa_a_hz / 5.0);
        c.g1_hz = g1_hz.value_or(4.0 * kappa_a_hz);
        c.g2_hz = g2_hz.value_or(4.0 * kappa_a_hz);
        return c;
    }

    SystemParams system_params() const {
        const Config c = resolved();
        SystemParams p;
        p.omega_a = units::hz_to_internal(c.omega_a_hz);
        p.omega_m1 = units::hz_to_internal(*c.omega_m1_hz);
        p.omega_m2 = units::hz_to_internal(*c.omega_m2_hz);
        p.omega_s = units::hz_to_internal(*c.omega_s_hz);
        p.kappa_a = units::hz_to_internal(c.kappa_a_hz);
        p.kappa_m1 = units::hz_to_internal(*c.kappa_m1_hz);
        p.kappa_m2 = units::hz_to_internal(*c.kappa_m2_hz);
        p.g1 = units::hz_to_internal(*c.g1_hz);
        p.g2 = units::hz_to_internal(*c.g2_hz);
        return p;
    }

    DriveParams drive() const { return DriveParams(r, theta_rad); }

    Environment environment() const { return Environment::at(temperature_k, system_params()); }

    /// Sets one key from its textual value. Throws UsageError on unknown key
    /// or unparsable number.
    void set(std::string_view key, std::string_view value) {
        const double v = parse_number(key, value);
        if (key == "omega_a_hz") omega_a_hz = v;
        else if (key == "omega_m1_hz") omega_m1_hz = v;
        else if (key == "omega_m2_hz") omega_m2_hz = v;
        else if (key == "omega_s_hz") omega_s_hz = v;
        else if (key == "kappa_a_hz") kappa_a_hz = v;
        else if (key == "kappa_m1_hz") kappa_m1_hz = v;
        else if (key == "kappa_m2_hz") kappa_m2_hz = v;
        else if (key == "g1_hz") g1_hz = v;
        else if (key == "g2_hz") g2_hz = v;
        else if (key == "r") r = v;
        else if (key == "theta_rad") theta_rad = v;
        else if (key == "temperature_k") temperature_k = v;
        else throw UsageError("unknown configuration key '" + std::string(key) + "'");
    }

    /// "key=value" as given on the command line.
    void set_assignment(std::string_view assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("expected key=value, got '" + std::string(assignment) + "'");
        set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    }

    /// Throws DomainError if the resulting physical parameters are invalid.
    void validate() const {
        cavmag::validate(system_params());
        (void)drive();
        (void)environment();
    }

    static std::string_view trim(std::string_view s) {
        const auto first = s.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) return {};
        const auto last = s.find_last_not_of(" \t\r");
        return s.substr(first, last - first + 1);
    }

private:
    static double parse_number(std::string_view key, std::string_view text) {
        double v = 0.0;
        const char* first = text.data();
        const char* last = text.data() + text.size();
        if (!text.empty() && *first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || text.empty())
            throw UsageError("invalid number '" + std::string(text) + "' for key '" +
                             std::string(key) + "'");
        return v;
    }
};

/// Ordered key/value pairs; later entries win when applied.
using Assignments = std::vector<std::pair<std::string, std::string>>;

/// Reads "key = value" lines. Keys and numbers are validated here, so a bad
/// file is reported with its line number before anything is evaluated.
inline Assignments read_assignments(std::istream& in) {
    Assignments out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = Config::trim(sv);
        if (sv.empty()) continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key(Config::trim(sv.substr(0, eq)));
        std::string value(Config::trim(sv.substr(eq + 1)));
        try {
            Config probe;
            probe.set(key, value);
        } catch (const UsageError& e) {
            throw UsageError("config line " + std::to_string(lineno) + ": " + e.what());
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline void apply_assignments(Config& cfg, const Assignments& assignments) {
    for (const auto& [k, v] : assignments) cfg.set(k, v);
}

/// File values on top of `base`.
inline Config parse_config(std::istream& in, Config base = {}) {
    apply_assignments(base, read_assignments(in));
    return base;
}

inline Config parse_config_text(std::string_view text, Config base = {}) {
    std::istringstream in{std::string(text)};
    return parse_config(in, std::move(base));
}

}  // namespace cavmag
