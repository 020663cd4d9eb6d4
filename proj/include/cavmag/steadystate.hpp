#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "dynamics.hpp"
#include "errors.hpp"
#include "units.hpp"

namespace cavmag {

/// Relative bound on max|A V + V A^T + D| / max|D| accepted from a solver.
inline constexpr double kLyapunovResidualTolerance = 1e-10;
/// Diffusion-diagonal dynamic range above which the solve is flagged as
/// ill-conditioned (cavity block spans e^{4r}; e^24 corresponds to r = 6).
inline const double kConditioningWarningRatio = std::exp(24.0);

/// Symplectic eigenvalues of a 2n x 2n covariance matrix, ascending.
/// They are the moduli of the eigenvalues of Omega V, Omega = (+) [[0,1],[-1,0]].
template <int Dim>
Eigen::Matrix<double, Dim / 2, 1> symplectic_eigenvalues(const Eigen::Matrix<double, Dim, Dim>& v) {
    static_assert(Dim % 2 == 0);
    Eigen::Matrix<double, Dim, Dim> omega = Eigen::Matrix<double, Dim, Dim>::Zero();
    for (int k = 0; k < Dim / 2; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    Eigen::EigenSolver<Eigen::Matrix<double, Dim, Dim>> solver(omega * v, false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symplectic eigenvalue iteration did not converge");
    Eigen::Matrix<double, Dim, 1> mods = solver.eigenvalues().cwiseAbs();
    std::sort(mods.data(), mods.data() + Dim);
    Eigen::Matrix<double, Dim / 2, 1> out;
    for (int k = 0; k < Dim / 2; ++k) out(k) = mods(2 * k);
    return out;
}

/// Symmetrised second moments of the quadratures (dX, dY, dx1, dy1, dx2, dy2).
/// Vacuum variance is 1/2 per quadrature. The stored matrix is exactly
/// symmetric: construction replaces v by (v + v^T) / 2.
class CovarianceMatrix {
public:
    CovarianceMatrix() = default;
    explicit CovarianceMatrix(const Mat6& v) : v_(0.5 * (v + v.transpose())) {}

    static CovarianceMatrix vacuum() { return CovarianceMatrix(0.5 * Mat6::Identity()); }

    const Mat6& matrix() const { return v_; }
    double operator()(int i, int j) const { return v_(i, j); }

    Eigen::Vector3d symplectic_eigenvalues() const { return cavmag::symplectic_eigenvalues<6>(v_); }

    /// Heisenberg bound: every symplectic eigenvalue >= 1/2 - tol.
    bool is_physical(double tol = 1e-9) const {
        return v_.diagonal().minCoeff() > 0.0 && symplectic_eigenvalues().minCoeff() >= 0.5 - tol;
    }

private:
    Mat6 v_ = Mat6::Zero();
};

inline double lyapunov_residual(const DriftMatrix& a, const DiffusionMatrix& d, const Mat6& v) {
    return (a.a * v + v * a.a.transpose() + d.d).cwiseAbs().maxCoeff();
}

struct LyapunovReport {
    CovarianceMatrix cov;
    double residual = 0.0;        // max|A V + V A^T + D|
    double diffusion_max = 0.0;   // max|D|
    bool ill_conditioned = false;
};

namespace detail {

inline void require_stable(const DriftMatrix& a) {
    const StabilityReport s = stability_check(a);
    if (!s.stable)
        throw NoSteadyState("no steady state: drift matrix has an eigenvalue with real part " +
                            std::to_string(s.max_real_part));
}

inline LyapunovReport finish_lyapunov(const DriftMatrix& a, const DiffusionMatrix& d, const Mat6& raw,
                                      const char* solver_name) {
    LyapunovReport rep;
    rep.cov = CovarianceMatrix(raw);
    rep.residual = lyapunov_residual(a, d, rep.cov.matrix());
    rep.diffusion_max = d.d.cwiseAbs().maxCoeff();
    if (!rep.cov.matrix().allFinite() || rep.residual > kLyapunovResidualTolerance * rep.diffusion_max)
        throw NumericalError(std::string(solver_name) + ": Lyapunov residual " +
                             std::to_string(rep.residual) + " exceeds tolerance relative to max|D| = " +
                             std::to_string(rep.diffusion_max));
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double x = std::abs(d.d(i, i));
        if (x > 0.0) dmin = std::min(dmin, x);
        dmax = std::max(dmax, x);
    }
    rep.ill_conditioned = dmax > 0.0 && dmax / dmin > kConditioningWarningRatio;
    return rep;
}

}  // namespace detail

/// Steady state of dV/dt = A V + V A^T + D by Bartels-Stewart on the complex
/// Schur form A = U T U^H: solve T Y + Y T^H = -U^H D U column by column from
/// the right, then V = Re(U Y U^H).
inline LyapunovReport solve_lyapunov_report(const DriftMatrix& a, const DiffusionMatrix& d) {
    using Complex = std::complex<double>;
    using CMat6 = Eigen::Matrix<Complex, 6, 6>;
    using CVec6 = Eigen::Matrix<Complex, 6, 1>;

    detail::require_stable(a);
    Eigen::ComplexSchur<CMat6> schur(a.a.cast<Complex>());
    if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
    const CMat6& u = schur.matrixU();
    const CMat6& t = schur.matrixT();
    const CMat6 c = -(u.adjoint() * d.d.cast<Complex>() * u);

    const double scale = std::max(a.a.cwiseAbs().maxCoeff(), 1.0);
    CMat6 y = CMat6::Zero();
    for (int j = 5; j >= 0; --j) {
        CVec6 rhs = c.col(j);
        for (int k = j + 1; k < 6; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
        const Complex shift = std::conj(t(j, j));
        for (int i = 5; i >= 0; --i) {
            Complex acc = rhs(i);
            for (int k = i + 1; k < 6; ++k) acc -= t(i, k) * y(k, j);
            const Complex pivot = t(i, i) + shift;
            if (std::abs(pivot) < 1e-13 * scale)
                throw NumericalError("Lyapunov operator is singular (eigenvalues lambda_i + conj(lambda_j) ~ 0)");
            y(i, j) = acc / pivot;
        }
    }
    const Mat6 v = (u * y * u.adjoint()).real();
    return detail::finish_lyapunov(a, d, v, "solve_lyapunov");
}

inline CovarianceMatrix solve_lyapunov(const DriftMatrix& a, const DiffusionMatrix& d) {
    return solve_lyapunov_report(a, d).cov;
}

/// Same fixed point via the vectorised 36x36 system (I (x) A + A (x) I) vec V = -vec D.
inline LyapunovReport solve_lyapunov_kron_report(const DriftMatrix& a, const DiffusionMatrix& d) {
    detail::require_stable(a);
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(36, 36);
    const auto idx = [](int i, int j) { return i + 6 * j; };  // column-major vec
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            for (int k = 0; k < 6; ++k) {
                op(idx(i, j), idx(k, j)) += a.a(i, k);  // A V
                op(idx(i, j), idx(i, k)) += a.a(j, k);  // V A^T
            }
    Eigen::VectorXd rhs(36);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i) rhs(idx(i, j)) = -d.d(i, j);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
    if (!lu.isInvertible()) throw NumericalError("vectorised Lyapunov operator is singular");
    const Eigen::VectorXd x = lu.solve(rhs);
    Mat6 v;
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i) v(i, j) = x(idx(i, j));
    return detail::finish_lyapunov(a, d, v, "solve_lyapunov_kron");
}

inline CovarianceMatrix solve_lyapunov_kron(const DriftMatrix& a, const DiffusionMatrix& d) {
    return solve_lyapunov_kron_report(a, d).cov;
}

/// Largest dt * max-row-sum(A) accepted by the propagator (internal units).
inline constexpr double kPropagatorStepGuard = 0.1;

struct NoObserver {
    void operator()(double, const CovarianceMatrix&) const {}
};

/// Fixed-step RK4 integration of dV/dt = A V + V A^T + D from v0 over
/// t_final seconds. The step is dt shrunk so that an integer number of steps
/// lands on t_final; V is symmetrised after every step. `observe(t_seconds, V)`
/// is called after each step.
template <typename Observer = NoObserver>
CovarianceMatrix propagate_covariance(const DriftMatrix& a, const DiffusionMatrix& d,
                                      const CovarianceMatrix& v0, double t_final_s, double dt_s,
                                      Observer&& observe = {}) {
    if (!(dt_s > 0.0)) throw DomainError("time step must be positive");
    if (!(t_final_s >= 0.0)) throw DomainError("final time must be non-negative");
    const double t_final = units::seconds_to_internal(t_final_s);
    const double dt = units::seconds_to_internal(dt_s);
    const double norm = a.a.cwiseAbs().rowwise().sum().maxCoeff();
    if (dt * norm > kPropagatorStepGuard)
        throw DomainError("time step too large: dt*|A| = " + std::to_string(dt * norm) +
                          " exceeds " + std::to_string(kPropagatorStepGuard) + "; use a smaller dt");

    const Mat6& am = a.a;
    const Mat6 at = am.transpose();
    const auto rhs = [&](const Mat6& v) -> Mat6 { return am * v + v * at + d.d; };

    const long steps = t_final == 0.0 ? 0 : static_cast<long>(std::ceil(t_final / dt - 1e-12));
    const double h = steps == 0 ? 0.0 : t_final / static_cast<double>(steps);
    Mat6 v = v0.matrix();
    for (long s = 0; s < steps; ++s) {
        const Mat6 k1 = rhs(v);
        const Mat6 k2 = rhs(v + 0.5 * h * k1);
        const Mat6 k3 = rhs(v + 0.5 * h * k2);
        const Mat6 k4 = rhs(v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        v = 0.5 * (v + v.transpose()).eval();
        observe(units::internal_to_seconds(h * static_cast<double>(s + 1)), CovarianceMatrix(v));
    }
    return CovarianceMatrix(v);
}

}  // namespace cavmag
