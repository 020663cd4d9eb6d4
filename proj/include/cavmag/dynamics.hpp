#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "errors.hpp"
#include "model.hpp"

namespace cavmag {

/// 6x6 real matrices in the quadrature basis (dX, dY, dx1, dy1, dx2, dy2).
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat2 = Eigen::Matrix2d;

/// Margin below which an eigenvalue real part counts as decaying.
inline constexpr double kStabilityEpsilon = 1e-9;

/// Drift matrix A of du/dt = A u + n.
struct DriftMatrix {
    Mat6 a = Mat6::Zero();
};

/// Diffusion matrix D, <n_i n_j + n_j n_i>/2 = D_ij delta(t - t').
struct DiffusionMatrix {
    Mat6 d = Mat6::Zero();
};

struct StabilityReport {
    bool stable = false;
    double max_real_part = 0.0;
    double margin = 0.0;
};

/// Counter-clockwise rotation of one quadrature pair.
inline Mat2 rotation2(double phi) {
    Mat2 r;
    r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    return r;
}

/// The same rotation applied to all three modes at once.
inline Mat6 quadrature_rotation(double phi) {
    Mat6 r = Mat6::Zero();
    const Mat2 b = rotation2(phi);
    for (int k = 0; k < 3; ++k) r.block<2, 2>(2 * k, 2 * k) = b;
    return r;
}

/// Linearised quadrature dynamics under the beam-splitter (rotating-wave)
/// coupling. Diagonal blocks are [[-kappa, Delta], [-Delta, -kappa]]; each
/// cavity-magnon block, in both directions, is g [[0, 1], [-1, 0]].
inline DriftMatrix build_drift(const Detunings& det, const SystemParams& p) {
    DriftMatrix out;
    Mat6& a = out.a;
    const double kappa[3] = {p.kappa_a, p.kappa_m1, p.kappa_m2};
    const double delta[3] = {det.delta_a, det.delta_m1, det.delta_m2};
    for (int k = 0; k < 3; ++k) {
        a(2 * k, 2 * k) = -kappa[k];
        a(2 * k + 1, 2 * k + 1) = -kappa[k];
        a(2 * k, 2 * k + 1) = delta[k];
        a(2 * k + 1, 2 * k) = -delta[k];
    }
    const double g[2] = {p.g1, p.g2};
    for (int i = 0; i < 2; ++i) {
        const int m = 2 * (i + 1);
        a(0, m + 1) = g[i];
        a(1, m) = -g[i];
        a(m, 1) = g[i];
        a(m + 1, 0) = -g[i];
    }
    return out;
}

/// Noise correlations of the squeezed-vacuum cavity input and the thermal
/// magnon baths. With N = sinh^2 r and M = e^{i theta} sinh r cosh r the
/// cavity block is 2 kappa_a [[N + 1/2 + Re M, Im M], [Im M, N + 1/2 - Re M]]
/// and each magnon block is 2 kappa_m (n_m + 1/2) I.
inline DiffusionMatrix build_diffusion(const SystemParams& p, const DriveParams& drive,
                                       const Environment& env) {
    DiffusionMatrix out;
    Mat6& d = out.d;
    const double n = drive.bath_n();
    const double re_m = drive.bath_m_abs() * std::cos(drive.theta());
    const double im_m = drive.bath_m_abs() * std::sin(drive.theta());
    d(0, 0) = 2.0 * p.kappa_a * (n + 0.5 + re_m);
    d(1, 1) = 2.0 * p.kappa_a * (n + 0.5 - re_m);
    d(0, 1) = 2.0 * p.kappa_a * im_m;
    d(1, 0) = d(0, 1);
    const double m1 = 2.0 * p.kappa_m1 * (env.n_m1() + 0.5);
    const double m2 = 2.0 * p.kappa_m2 * (env.n_m2() + 0.5);
    d(2, 2) = m1;
    d(3, 3) = m1;
    d(4, 4) = m2;
    d(5, 5) = m2;
    return out;
}

/// Eigenvalue test of asymptotic stability; stable iff every real part is
/// below -kStabilityEpsilon.
inline StabilityReport stability_check(const DriftMatrix& drift) {
    if (!drift.a.allFinite()) throw NumericalError("drift matrix contains non-finite entries");
    Eigen::EigenSolver<Mat6> solver(drift.a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue iteration for the drift matrix did not converge");
    double max_re = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) max_re = std::max(max_re, solver.eigenvalues()(i).real());
    return {max_re < -kStabilityEpsilon, max_re, -max_re};
}

/// Convenience: drift, diffusion and stability for one parameter point.
struct LinearModel {
    DriftMatrix drift;
    DiffusionMatrix diffusion;
    StabilityReport stability;
};

inline LinearModel build_linear_model(const SystemParams& p, const DriveParams& drive,
                                      const Environment& env) {
    LinearModel m;
    m.drift = build_drift(detunings_from(p), p);
    m.diffusion = build_diffusion(p, drive, env);
    m.stability = stability_check(m.drift);
    return m;
}

}  // namespace cavmag
