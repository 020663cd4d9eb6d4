#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>

#include "errors.hpp"
#include "steadystate.hpp"

namespace cavmag {

// Separability thresholds in the vacuum = 1/2 convention. Not configurable.
inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kDuanBound = 1.0;
inline constexpr double kManciniBound = 0.25;

using Mat4 = Eigen::Matrix4d;

/// Magnon-magnon block of a covariance matrix, basis (dx1, dy1, dx2, dy2).
class TwoModeCM {
public:
    TwoModeCM() = default;
    explicit TwoModeCM(const Mat4& v) : v_(0.5 * (v + v.transpose())) {}

    const Mat4& matrix() const { return v_; }
    double operator()(int i, int j) const { return v_(i, j); }

    Eigen::Vector2d symplectic_eigenvalues() const { return cavmag::symplectic_eigenvalues<4>(v_); }

    /// Exchange the two modes.
    TwoModeCM swapped() const {
        Eigen::PermutationMatrix<4> p;
        p.indices() << 2, 3, 0, 1;
        return TwoModeCM(p * v_ * p.transpose());
    }

private:
    Mat4 v_ = Mat4::Zero();
};

inline TwoModeCM reduce_to_magnons(const CovarianceMatrix& v) {
    return TwoModeCM(v.matrix().block<4, 4>(2, 2));
}

struct EntanglementResult {
    double log_negativity = 0.0;
    double nu_minus = 0.0;
};

/// Logarithmic negativity max(0, -ln 2 nu_-), where nu_- is the smallest
/// modulus among the eigenvalues of i Omega P V P with P = diag(1, 1, 1, -1)
/// (partial transposition of the second mode).
inline EntanglementResult log_negativity(const TwoModeCM& v) {
    using Complex = std::complex<double>;
    using CMat4 = Eigen::Matrix<Complex, 4, 4>;
    const Eigen::Vector4d p_diag(1.0, 1.0, 1.0, -1.0);
    const Mat4 vt = p_diag.asDiagonal() * v.matrix() * p_diag.asDiagonal();
    Mat4 omega = Mat4::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    const CMat4 m = Complex(0.0, 1.0) * (omega * vt).cast<Complex>();
    Eigen::ComplexEigenSolver<CMat4> solver(m, false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("partial-transpose eigenvalue iteration did not converge");

    const auto& ev = solver.eigenvalues();
    double max_abs = 0.0, max_imag = 0.0;
    double nu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        max_abs = std::max(max_abs, std::abs(ev(i)));
        max_imag = std::max(max_imag, std::abs(ev(i).imag()));
        nu = std::min(nu, std::abs(ev(i)));
    }
    if (max_imag > 1e-9 * max_abs)
        throw NumericalError("partial-transpose spectrum is not real; covariance matrix is unphysical");
    if (!(nu > 0.0)) throw NumericalError("vanishing symplectic eigenvalue");
    return {std::max(0.0, -std::log(2.0 * nu)), nu};
}

inline EntanglementResult log_negativity(const CovarianceMatrix& v) {
    return log_negativity(reduce_to_magnons(v));
}

/// Variances of the bright/dark collective quadratures
/// M = (m1 + m2)/sqrt2 and m = (m1 - m2)/sqrt2.
struct CollectiveVariances {
    double var_Mx = 0.0;
    double var_My = 0.0;
    double var_mx = 0.0;
    double var_my = 0.0;
};

inline CollectiveVariances collective_variances(const CovarianceMatrix& v) {
    const double xx = v(2, 2) + v(4, 4);
    const double yy = v(3, 3) + v(5, 5);
    const double x12 = 2.0 * v(2, 4);
    const double y12 = 2.0 * v(3, 5);
    return {(xx + x12) / 2.0, (yy + y12) / 2.0, (xx - x12) / 2.0, (yy - y12) / 2.0};
}

/// <dMx^2> + <dmy^2>; below kDuanBound certifies entanglement.
inline double duan_sum(const CovarianceMatrix& v) {
    const auto c = collective_variances(v);
    return c.var_Mx + c.var_my;
}

/// <dMx^2> <dmy^2>; below kManciniBound certifies entanglement.
inline double mancini_product(const CovarianceMatrix& v) {
    const auto c = collective_variances(v);
    return c.var_Mx * c.var_my;
}

/// -10 log10(variance / 1/2); positive means below vacuum noise.
inline double squeezing_db(double variance) {
    if (!(variance > 0.0)) throw DomainError("variance must be positive");
    return -10.0 * std::log10(variance / kVacuumVariance);
}

/// Squeezing of the input field, 10 log10(e^{2r}) = 20 r / ln 10.
inline double input_squeezing_db(double r) {
    if (!(r >= 0.0)) throw DomainError("squeezing parameter r must be >= 0");
    return 20.0 * r / std::log(10.0);
}

}  // namespace cavmag
