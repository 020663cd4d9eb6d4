#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "dynamics.hpp"
#include "measures.hpp"
#include "steadystate.hpp"
#include "sweep.hpp"

namespace cavmag {

struct VerificationCheck {
    int criterion = 0;
    std::string name;
    std::string detail;
    bool passed = false;
};

/// Random stable drift and positive semidefinite diffusion:
/// A = K - (B B^T / 6 + I/2) with K antisymmetric, D = C C^T.
/// Every eigenvalue of A has real part <= -1/2.
struct LyapunovCase {
    DriftMatrix a;
    DiffusionMatrix d;
};

inline LyapunovCase random_lyapunov_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat6 b, k, c;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            b(i, j) = u(rng);
            k(i, j) = 3.0 * u(rng);
            c(i, j) = u(rng);
        }
    LyapunovCase out;
    out.a.a = (k - k.transpose()) / 2.0 - b * b.transpose() / 6.0 - 0.5 * Mat6::Identity();
    out.d.d = c * c.transpose();
    out.d.d = 0.5 * (out.d.d + out.d.d.transpose()).eval();
    return out;
}

namespace detail {

inline std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

inline Config reference_config() {
    Config c;  // reference point, r = 2, theta = 0, T = 20 mK
    return c;
}

}  // namespace detail

/// Runs the fixed reproduction checks. `points` sets the per-axis resolution
/// of the preset grids that some checks scan.
inline std::vector<VerificationCheck> verify_reference_numbers(int points = 101) {
    using detail::fmt;
    std::vector<VerificationCheck> out;
    const auto add = [&](int id, std::string name, std::string detail, bool ok) {
        out.push_back({id, std::move(name), std::move(detail), ok});
    };

    const Config ref = detail::reference_config();
    const PointMeasures at_ref = evaluate_point(ref);

    {
        const double db = squeezing_db(at_ref.cov(2, 2));
        add(1, "magnon squeezing 2.27 dB", "got " + fmt(db) + " dB, tolerance 0.05 dB",
            std::abs(db - 2.27) <= 0.05);
    }
    {
        const double db = squeezing_db(at_ref.collective.var_Mx);
        add(2, "collective Mx squeezing 7.28 dB", "got " + fmt(db) + " dB, tolerance 0.05 dB",
            std::abs(db - 7.28) <= 0.05);
    }
    {
        const double db = input_squeezing_db(2.0);
        add(3, "input squeezing at r=2 ~ 17.35 dB", "got " + fmt(db) + " dB, tolerance 0.05 dB",
            std::abs(db - 17.35) <= 0.05);
    }
    {
        Config zero_t = ref;
        zero_t.temperature_k = 0.0;
        const double v20 = at_ref.collective.var_my;
        const double v0 = evaluate_point(zero_t).collective.var_my;
        add(4, "dark-mode variance var_my = 1/2",
            "T=20mK: |var_my-0.5| = " + fmt(std::abs(v20 - 0.5), 3) + " (<=1e-6); T=0: " +
                fmt(std::abs(v0 - 0.5), 3) + " (<=1e-10)",
            std::abs(v20 - 0.5) <= 1e-6 && std::abs(v0 - 0.5) <= 1e-10);
    }
    {
        const SweepResult grid = run_sweep(preset("fig2b", points));
        const auto col = *grid.column(Quantity::log_negativity);
        std::size_t best = 0;
        for (std::size_t k = 0; k < grid.rows.size(); ++k)
            if (grid.rows[k].stable && grid.rows[k].values[col] > grid.rows[best].values[col]) best = k;
        const SweepRow& row = grid.rows[best];
        // grid point nearest the origin
        std::size_t centre = 0;
        double dmin = INFINITY;
        for (std::size_t k = 0; k < grid.rows.size(); ++k) {
            const double d = std::hypot(grid.rows[k].axis1_value, grid.rows[k].axis2_value);
            if (d < dmin) dmin = d, centre = k;
        }
        add(5, "entanglement maximal at resonance (fig2b)",
            "argmax at (" + fmt(row.axis1_value) + ", " + fmt(row.axis2_value) + ") MHz, E = " +
                fmt(row.values[col]),
            best == centre);
    }
    {
        Config r1 = ref;
        r1.r = 1.0;
        const double e1 = evaluate_point(r1).entanglement.log_negativity;
        const double e2 = at_ref.entanglement.log_negativity;
        add(6, "E grows with squeezing", "E(r=1) = " + fmt(e1) + ", E(r=2) = " + fmt(e2),
            e1 > 0.0 && e2 > e1);
    }
    {
        const SweepResult t = run_sweep(preset("fig3", points));
        const auto col = *t.column(Quantity::log_negativity);
        bool positive = true, monotone = true;
        for (std::size_t k = 0; k < t.rows.size(); ++k) {
            positive = positive && t.rows[k].stable && t.rows[k].values[col] > 0.0;
            if (k > 0) monotone = monotone && t.rows[k].values[col] <= t.rows[k - 1].values[col];
        }
        add(7, "entanglement survives to 0.5 K",
            "E(0.5 K) = " + fmt(t.rows.back().values[col]) + (monotone ? ", non-increasing" : ", NOT monotone"),
            positive && monotone);
    }
    {
        std::size_t bad = 0;
        for (const char* name : {"fig2a", "fig2b", "fig4a"}) bad += certification_violations(run_sweep(preset(name, points)));
        const bool resonant = at_ref.duan < kDuanBound && at_ref.mancini < kManciniBound;
        add(8, "Duan/Mancini certification consistent with E",
            std::to_string(bad) + " violating grid points; resonance duan = " + fmt(at_ref.duan) +
                ", mancini = " + fmt(at_ref.mancini),
            bad == 0 && resonant);
    }
    {
        double worst_diff = 0.0, worst_res = 0.0;
        const auto compare = [&](const DriftMatrix& a, const DiffusionMatrix& d) {
            const LyapunovReport s = solve_lyapunov_report(a, d);
            const LyapunovReport k = solve_lyapunov_kron_report(a, d);
            worst_diff = std::max(worst_diff, (s.cov.matrix() - k.cov.matrix()).cwiseAbs().maxCoeff());
            worst_res = std::max({worst_res, s.residual / s.diffusion_max, k.residual / k.diffusion_max});
        };
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const LyapunovCase c = random_lyapunov_case(seed);
            compare(c.a, c.d);
        }
        const LinearModel m = build_linear_model(ref.system_params(), ref.drive(), ref.environment());
        compare(m.drift, m.diffusion);
        add(9, "Schur and Kronecker Lyapunov solvers agree",
            "max entry difference " + fmt(worst_diff, 3) + " (<=1e-9), max relative residual " +
                fmt(worst_res, 3) + " (<1e-10)",
            worst_diff <= 1e-9 && worst_res < kLyapunovResidualTolerance);
    }
    {
        const SystemParams p = ref.system_params();
        const LinearModel m = build_linear_model(p, ref.drive(), ref.environment());
        const double t_final = units::internal_to_seconds(50.0 / p.kappa_m1);
        const double dt = units::internal_to_seconds(0.002);
        const CovarianceMatrix v = propagate_covariance(m.drift, m.diffusion, CovarianceMatrix::vacuum(), t_final, dt);
        const double diff = (v.matrix() - at_ref.cov.matrix()).cwiseAbs().maxCoeff();
        add(10, "transient covariance converges to steady state",
            "max entry difference " + fmt(diff, 3) + " (<=1e-6)", diff <= 1e-6);
    }
    {
        double worst_e = 0.0;
        double min_nu = INFINITY;
        const double span = 3.0 * units::hz_to_internal(ref.kappa_a_hz);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                for (double temp : {0.0, 0.02, 0.5}) {
                    Config c = ref.resolved();
                    c.r = 0.0;
                    c.temperature_k = temp;
                    apply_axis(c, Axis::delta_a, -span + span * i / 2.0);
                    apply_axis(c, Axis::delta_m, -span + span * j / 2.0);
                    const PointMeasures m = evaluate_point(c);
                    worst_e = std::max(worst_e, m.entanglement.log_negativity);
                    min_nu = std::min(min_nu, m.cov.symplectic_eigenvalues().minCoeff());
                }
        min_nu = std::min(min_nu, at_ref.cov.symplectic_eigenvalues().minCoeff());
        add(11, "physical covariance matrices, no entanglement without squeezing",
            "max E(r=0) = " + fmt(worst_e, 3) + " (<=1e-12), min symplectic eigenvalue " + fmt(min_nu, 12),
            worst_e <= 1e-12 && min_nu >= 0.5 - 1e-9);
    }
    {
        double spread = 0.0;
        const double e0 = at_ref.entanglement.log_negativity;
        for (double th : {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi}) {
            Config c = ref;
            c.theta_rad = th;
            spread = std::max(spread, std::abs(evaluate_point(c).entanglement.log_negativity - e0));
        }
        const SweepResult g = run_sweep(preset("fig5b", std::min(points, 21)));
        const auto col = *g.column(Quantity::var_x1);
        const int n2 = g.spec.axis2->range.count;
        double theta_variation = 0.0;
        for (int i = 0; i < g.spec.axis1.range.count; ++i)
            for (int j = 1; j < n2; ++j)
                theta_variation = std::max(theta_variation, std::abs(g.at(i, j).values[col] - g.at(i, 0).values[col]));
        add(12, "entanglement independent of squeezing phase",
            "max |E(theta)-E(0)| = " + fmt(spread, 3) + " (<=1e-9); var_x1 variation along theta " +
                fmt(theta_variation, 3),
            spread <= 1e-9 && theta_variation > 1e-6);
    }
    {
        Config c = ref.resolved();
        c.g2_hz = 0.5 * *c.g1_hz;
        const double e_half = evaluate_point(c).entanglement.log_negativity;
        add(13, "unequal coupling reduces entanglement",
            "E(g2=g1/2) = " + fmt(e_half) + " < E(g2=g1) = " + fmt(at_ref.entanglement.log_negativity),
            e_half < at_ref.entanglement.log_negativity);
    }
    return out;
}

}  // namespace cavmag
