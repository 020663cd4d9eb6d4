#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "measures.hpp"
#include "steadystate.hpp"

namespace cavmag {

/// Sweepable parameters. Detuning axes are Delta/2pi in MHz and move the
/// cavity (delta_a) or both magnons together (delta_m) relative to a fixed
/// drive frequency; temperature is in K, theta in rad.
enum class Axis { delta_a, delta_m, r, theta, temperature };

enum class Quantity {
    log_negativity,
    duan_sum,
    mancini_product,
    var_x1,
    var_Mx,
    var_my,
    squeezing_db_x1,
    squeezing_db_Mx,
};

inline constexpr std::array kAllAxes = {Axis::delta_a, Axis::delta_m, Axis::r, Axis::theta,
                                        Axis::temperature};
inline constexpr std::array kAllQuantities = {
    Quantity::log_negativity, Quantity::duan_sum,        Quantity::mancini_product,
    Quantity::var_x1,         Quantity::var_Mx,          Quantity::var_my,
    Quantity::squeezing_db_x1, Quantity::squeezing_db_Mx};

constexpr std::string_view name_of(Axis a) {
    switch (a) {
        case Axis::delta_a: return "delta_a";
        case Axis::delta_m: return "delta_m";
        case Axis::r: return "r";
        case Axis::theta: return "theta";
        case Axis::temperature: return "temperature";
    }
    return "?";
}

constexpr std::string_view name_of(Quantity q) {
    switch (q) {
        case Quantity::log_negativity: return "log_negativity";
        case Quantity::duan_sum: return "duan_sum";
        case Quantity::mancini_product: return "mancini_product";
        case Quantity::var_x1: return "var_x1";
        case Quantity::var_Mx: return "var_Mx";
        case Quantity::var_my: return "var_my";
        case Quantity::squeezing_db_x1: return "squeezing_db_x1";
        case Quantity::squeezing_db_Mx: return "squeezing_db_Mx";
    }
    return "?";
}

inline Axis parse_axis(std::string_view name) {
    for (Axis a : kAllAxes)
        if (name_of(a) == name) return a;
    throw UsageError("unknown sweep axis '" + std::string(name) +
                     "' (expected delta_a, delta_m, r, theta or temperature)");
}

inline Quantity parse_quantity(std::string_view name) {
    for (Quantity q : kAllQuantities)
        if (name_of(q) == name) return q;
    throw UsageError("unknown output quantity '" + std::string(name) + "'");
}

/// Evenly spaced samples. With include_max the last sample is exactly max and
/// a range symmetric about zero yields exactly mirrored samples.
struct Range {
    double min = 0.0;
    double max = 1.0;
    int count = 2;
    bool include_max = true;

    double value(int i) const {
        if (include_max) {
            const double n = count - 1;
            return (min * (n - i) + max * i) / n;
        }
        return min + (max - min) * i / count;
    }
};

struct AxisSpec {
    Axis axis = Axis::r;
    Range range;
};

struct SweepSpec {
    std::string name;
    AxisSpec axis1;
    std::optional<AxisSpec> axis2;
    Config fixed;
    std::vector<Quantity> outputs;

    std::size_t point_count() const {
        return static_cast<std::size_t>(axis1.range.count) *
               static_cast<std::size_t>(axis2 ? axis2->range.count : 1);
    }

    void validate() const {
        const auto check = [](const AxisSpec& a) {
            if (a.range.count < 2)
                throw UsageError("axis '" + std::string(name_of(a.axis)) + "' needs at least 2 points");
            if (!(a.range.min < a.range.max))
                throw UsageError("axis '" + std::string(name_of(a.axis)) + "' needs min < max");
        };
        check(axis1);
        if (axis2) {
            check(*axis2);
            if (axis2->axis == axis1.axis) throw UsageError("sweep axes must differ");
        }
        if (outputs.empty()) throw UsageError("sweep requests no output quantities");
        fixed.validate();
    }
};

/// Sets one axis on a fully resolved configuration.
inline void apply_axis(Config& resolved, Axis axis, double value) {
    switch (axis) {
        case Axis::delta_a:
            resolved.omega_a_hz = *resolved.omega_s_hz + value * units::kHzPerInternal;
            break;
        case Axis::delta_m:
            resolved.omega_m1_hz = *resolved.omega_s_hz + value * units::kHzPerInternal;
            resolved.omega_m2_hz = resolved.omega_m1_hz;
            break;
        case Axis::r: resolved.r = value; break;
        case Axis::theta: resolved.theta_rad = value; break;
        case Axis::temperature: resolved.temperature_k = value; break;
    }
}

/// Every diagnostic at one parameter point. `cov` and the measures are only
/// meaningful when stability.stable is true.
struct PointMeasures {
    StabilityReport stability;
    CovarianceMatrix cov;
    EntanglementResult entanglement;
    CollectiveVariances collective;
    double duan = std::numeric_limits<double>::quiet_NaN();
    double mancini = std::numeric_limits<double>::quiet_NaN();
    bool ill_conditioned = false;

    double quantity(Quantity q) const {
        switch (q) {
            case Quantity::log_negativity: return entanglement.log_negativity;
            case Quantity::duan_sum: return duan;
            case Quantity::mancini_product: return mancini;
            case Quantity::var_x1: return cov(2, 2);
            case Quantity::var_Mx: return collective.var_Mx;
            case Quantity::var_my: return collective.var_my;
            case Quantity::squeezing_db_x1: return squeezing_db(cov(2, 2));
            case Quantity::squeezing_db_Mx: return squeezing_db(collective.var_Mx);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};

inline PointMeasures evaluate_point(const SystemParams& p, const DriveParams& drive,
                                    const Environment& env) {
    PointMeasures out;
    const LinearModel model = build_linear_model(p, drive, env);
    out.stability = model.stability;
    if (!out.stability.stable) return out;
    const LyapunovReport rep = solve_lyapunov_report(model.drift, model.diffusion);
    out.cov = rep.cov;
    out.ill_conditioned = rep.ill_conditioned;
    out.entanglement = log_negativity(out.cov);
    out.collective = collective_variances(out.cov);
    out.duan = out.collective.var_Mx + out.collective.var_my;
    out.mancini = out.collective.var_Mx * out.collective.var_my;
    return out;
}

inline PointMeasures evaluate_point(const Config& cfg) {
    return evaluate_point(cfg.system_params(), cfg.drive(), cfg.environment());
}

struct SweepRow {
    double axis1_value = 0.0;
    double axis2_value = std::numeric_limits<double>::quiet_NaN();
    bool stable = false;
    bool ill_conditioned = false;
    std::vector<double> values;  // one per requested output; empty when unstable
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;  // axis1-major, then axis2

    const SweepRow& at(int i1, int i2 = 0) const {
        const int n2 = spec.axis2 ? spec.axis2->range.count : 1;
        return rows.at(static_cast<std::size_t>(i1) * n2 + i2);
    }

    std::optional<std::size_t> column(Quantity q) const {
        const auto it = std::find(spec.outputs.begin(), spec.outputs.end(), q);
        if (it == spec.outputs.end()) return std::nullopt;
        return static_cast<std::size_t>(it - spec.outputs.begin());
    }
};

/// Evaluates every grid point. Points are independent and are spread over
/// `threads` workers (0 = hardware concurrency); rows are stored by grid index
/// so the result does not depend on scheduling.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    spec.validate();
    SweepResult result;
    result.spec = spec;
    const std::size_t n = spec.point_count();
    const int n2 = spec.axis2 ? spec.axis2->range.count : 1;
    result.rows.resize(n);
    const Config base = spec.fixed.resolved();

    const auto eval = [&](std::size_t k) {
        SweepRow& row = result.rows[k];
        const int i1 = static_cast<int>(k / n2);
        const int i2 = static_cast<int>(k % n2);
        Config cfg = base;
        row.axis1_value = spec.axis1.range.value(i1);
        apply_axis(cfg, spec.axis1.axis, row.axis1_value);
        if (spec.axis2) {
            row.axis2_value = spec.axis2->range.value(i2);
            apply_axis(cfg, spec.axis2->axis, row.axis2_value);
        }
        const PointMeasures m = evaluate_point(cfg);
        row.stable = m.stability.stable;
        row.ill_conditioned = m.ill_conditioned;
        if (row.stable) {
            row.values.reserve(spec.outputs.size());
            for (Quantity q : spec.outputs) row.values.push_back(m.quantity(q));
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t k = 0; k < n; ++k) eval(k);
        return result;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t k = next++; k < n; k = next++) eval(k);
                } catch (...) {
                    errors[t] = std::current_exception();
                    next = n;
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return result;
}

// ---------------------------------------------------------------------------
// presets

inline constexpr std::array<std::string_view, 10> kPresetNames = {
    "fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig6c"};

/// Decouples the second magnon (g2 = 0); its bath stays attached.
inline SweepSpec single_sample_mode(SweepSpec spec) {
    spec.fixed.g2_hz = 0.0;
    return spec;
}

/// Default range of an axis: +-3 kappa_a for detunings, r in [0, 3],
/// theta in [0, 2pi), T in [0, 0.5] K.
inline Range default_range(Axis axis, const Config& cfg, int points) {
    switch (axis) {
        case Axis::delta_a:
        case Axis::delta_m: {
            const double span = 3.0 * units::hz_to_internal(cfg.kappa_a_hz);
            return {-span, span, points, true};
        }
        case Axis::r: return {0.0, 3.0, points, true};
        case Axis::theta: return {0.0, 2.0 * std::numbers::pi, points, false};
        case Axis::temperature: return {0.0, 0.5, points, true};
    }
    return {};
}

/// Sweep reproducing one figure. The preset's fixed values (r, theta, T and
/// the resonant frequencies) form the bottom layer; `overrides` (config file
/// entries, then command-line entries) are applied on top before the default
/// axis ranges are derived.
inline SweepSpec preset(std::string_view name, int points = 101, const Assignments& overrides = {}) {
    if (points < 2) throw UsageError("presets need at least 2 points per axis");
    SweepSpec s;
    s.name = std::string(name);
    Axis a1 = Axis::r;
    std::optional<Axis> a2;
    bool single_sample = false;
    const std::vector<Quantity> criteria = {Quantity::log_negativity, Quantity::duan_sum,
                                            Quantity::mancini_product};

    if (name == "fig2a" || name == "fig2b") {
        s.fixed.r = name == "fig2a" ? 1.0 : 2.0;
        a1 = Axis::delta_a;
        a2 = Axis::delta_m;
        s.outputs = criteria;
    } else if (name == "fig3") {
        a1 = Axis::temperature;
        s.outputs = criteria;
    } else if (name == "fig4a") {
        a1 = Axis::delta_a;
        a2 = Axis::delta_m;
        s.outputs = {Quantity::duan_sum, Quantity::mancini_product, Quantity::log_negativity};
    } else if (name == "fig4b") {
        a1 = Axis::delta_a;
        a2 = Axis::r;
        s.outputs = {Quantity::var_Mx, Quantity::squeezing_db_Mx, Quantity::var_my};
    } else if (name == "fig5a") {
        a1 = Axis::delta_a;
        a2 = Axis::delta_m;
        s.outputs = {Quantity::var_x1, Quantity::squeezing_db_x1};
    } else if (name == "fig5b") {
        a1 = Axis::r;
        a2 = Axis::theta;
        s.outputs = {Quantity::var_x1, Quantity::squeezing_db_x1};
    } else if (name == "fig6a" || name == "fig6b") {
        a1 = Axis::r;
        a2 = Axis::temperature;
        s.outputs = {Quantity::var_x1, Quantity::squeezing_db_x1};
        single_sample = name == "fig6b";
    } else if (name == "fig6c") {
        a1 = Axis::r;
        a2 = Axis::temperature;
        s.outputs = {Quantity::var_Mx, Quantity::squeezing_db_Mx};
    } else {
        std::string msg = "unknown preset '" + std::string(name) + "'; available:";
        for (auto p : kPresetNames) msg += " " + std::string(p);
        throw UsageError(msg);
    }
    if (single_sample) s = single_sample_mode(std::move(s));
    apply_assignments(s.fixed, overrides);
    s.axis1 = {a1, default_range(a1, s.fixed, points)};
    if (a2) s.axis2 = AxisSpec{*a2, default_range(*a2, s.fixed, points)};
    return s;
}

/// Overrides one axis range by axis name ("key=min:max" on the command line).
inline void override_range(SweepSpec& spec, std::string_view assignment) {
    const auto eq = assignment.find('=');
    const auto colon = assignment.find(':', eq == std::string_view::npos ? 0 : eq);
    if (eq == std::string_view::npos || colon == std::string_view::npos)
        throw UsageError("expected --range key=min:max, got '" + std::string(assignment) + "'");
    const Axis axis = parse_axis(Config::trim(assignment.substr(0, eq)));
    const auto num = [&](std::string_view t) {
        t = Config::trim(t);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
            throw UsageError("invalid range bound '" + std::string(t) + "'");
        return v;
    };
    const double lo = num(assignment.substr(eq + 1, colon - eq - 1));
    const double hi = num(assignment.substr(colon + 1));
    AxisSpec* target = nullptr;
    if (spec.axis1.axis == axis) target = &spec.axis1;
    else if (spec.axis2 && spec.axis2->axis == axis) target = &*spec.axis2;
    if (!target)
        throw UsageError("axis '" + std::string(name_of(axis)) + "' is not swept by preset '" +
                         spec.name + "'");
    target->range.min = lo;
    target->range.max = hi;
    target->range.include_max = true;
}

inline void set_points(SweepSpec& spec, int points) {
    if (points < 2) throw UsageError("--points must be at least 2");
    spec.axis1.range.count = points;
    if (spec.axis2) spec.axis2->range.count = points;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest text with 17 significant digits (round-trips a double exactly).
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                         std::chars_format::general, 17);
    if (ec != std::errc()) throw NumericalError("number formatting failed");
    return std::string(buf.data(), ptr);
}

/// Header: axis columns, one column per requested quantity, then `stability`.
/// Unstable rows leave quantity cells empty. Lines end with '\n'.
inline void write_csv(const SweepResult& result, std::ostream& out) {
    const SweepSpec& s = result.spec;
    out << name_of(s.axis1.axis);
    if (s.axis2) out << ',' << name_of(s.axis2->axis);
    for (Quantity q : s.outputs) out << ',' << name_of(q);
    out << ",stability\n";
    for (const SweepRow& row : result.rows) {
        out << format_number(row.axis1_value);
        if (s.axis2) out << ',' << format_number(row.axis2_value);
        for (std::size_t c = 0; c < s.outputs.size(); ++c) {
            out << ',';
            if (row.stable) out << format_number(row.values[c]);
        }
        out << ',' << (row.stable ? "stable" : "unstable") << '\n';
    }
}

// ---------------------------------------------------------------------------
// post-pass checks

/// Stable rows where Duan < 1 or Mancini < 1/4 but E == 0 (a sufficient
/// criterion certifying entanglement the negativity does not see).
inline std::size_t certification_violations(const SweepResult& result) {
    const auto e = result.column(Quantity::log_negativity);
    if (!e) return 0;
    const auto duan = result.column(Quantity::duan_sum);
    const auto man = result.column(Quantity::mancini_product);
    std::size_t bad = 0;
    for (const SweepRow& row : result.rows) {
        if (!row.stable) continue;
        const bool entangled = row.values[*e] > 0.0;
        if (duan && row.values[*duan] < kDuanBound && !entangled) ++bad;
        else if (man && row.values[*man] < kManciniBound && !entangled) ++bad;
    }
    return bad;
}

/// For a (delta_a, delta_m) grid with ranges symmetric about zero, the number
/// of points whose `q` differs from its (-delta_a, -delta_m) mirror by more than
/// `tol`. nullopt when the grid is not of that form or q is not an output.
inline std::optional<std::size_t> mirror_symmetry_violations(const SweepResult& result, Quantity q,
                                                             double tol = 1e-9) {
    const SweepSpec& s = result.spec;
    const auto col = result.column(q);
    if (!col || !s.axis2) return std::nullopt;
    const auto is_detuning = [](Axis a) { return a == Axis::delta_a || a == Axis::delta_m; };
    if (!is_detuning(s.axis1.axis) || !is_detuning(s.axis2->axis)) return std::nullopt;
    const auto symmetric = [](const Range& r) { return r.include_max && r.min == -r.max; };
    if (!symmetric(s.axis1.range) || !symmetric(s.axis2->range)) return std::nullopt;
    const int n1 = s.axis1.range.count, n2 = s.axis2->range.count;
    std::size_t bad = 0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const SweepRow& a = result.at(i, j);
            const SweepRow& b = result.at(n1 - 1 - i, n2 - 1 - j);
            if (a.stable != b.stable) ++bad;
            else if (a.stable && !(std::abs(a.values[*col] - b.values[*col]) <= tol)) ++bad;
        }
    return bad;
}

}  // namespace cavmag
