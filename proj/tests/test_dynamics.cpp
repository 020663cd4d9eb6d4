#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cavmag/dynamics.hpp"
#include "oracles.hpp"

using namespace cavmag;

namespace {

SystemParams defaults() { return reference_defaults().params; }

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> pos(0.1, 10.0), det(-20.0, 20.0), g(0.0, 30.0);
    SystemParams p;
    p.omega_s = 10000.0;
    p.omega_a = p.omega_s + det(rng);
    p.omega_m1 = p.omega_s + det(rng);
    p.omega_m2 = p.omega_s + det(rng);
    p.kappa_a = pos(rng);
    p.kappa_m1 = pos(rng);
    p.kappa_m2 = pos(rng);
    p.g1 = g(rng);
    p.g2 = g(rng);
    return p;
}

}  // namespace

TEST(BuildDrift, DecoupledResonantModesAreDiagonal) {
    SystemParams p = defaults();
    p.g1 = p.g2 = 0.0;
    const Mat6 a = build_drift(Detunings{}, p).a;
    Eigen::Matrix<double, 6, 1> diag;
    diag << -5, -5, -1, -1, -1, -1;
    EXPECT_EQ(a, Mat6(diag.asDiagonal()));
}

TEST(BuildDrift, ReferenceCouplingPattern) {
    const SystemParams p = defaults();
    const Mat6 a = build_drift(detunings_from(p), p).a;
    EXPECT_EQ(a(0, 3), 20.0);
    EXPECT_EQ(a(1, 2), -20.0);
    EXPECT_EQ(a(2, 1), 20.0);
    EXPECT_EQ(a(3, 0), -20.0);
    EXPECT_EQ(a(0, 5), 20.0);
    EXPECT_EQ(a(1, 4), -20.0);
    EXPECT_EQ(a(4, 1), 20.0);
    EXPECT_EQ(a(5, 0), -20.0);
    EXPECT_EQ(a(2, 2), -1.0);
    EXPECT_EQ(a(0, 0), -5.0);
}

TEST(BuildDrift, CavityDetuningEntries) {
    const SystemParams p = defaults();
    Detunings d;
    d.delta_a = p.kappa_a;
    const Mat6 a = build_drift(d, p).a;
    EXPECT_EQ(a(0, 1), p.kappa_a);
    EXPECT_EQ(a(1, 0), -p.kappa_a);
}

TEST(BuildDrift, NoDirectMagnonMagnonCouplingAndRotationInvariance) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const SystemParams p = random_params(rng);
        const Mat6 a = build_drift(detunings_from(p), p).a;
        EXPECT_TRUE((a.block<2, 2>(2, 4).isZero(0.0)));
        EXPECT_TRUE((a.block<2, 2>(4, 2).isZero(0.0)));
        const Mat6 r = quadrature_rotation(0.3);
        EXPECT_LT((r * a * r.transpose() - a).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BuildDiffusion, VacuumInputs) {
    const SystemParams p = defaults();
    const Mat6 d = build_diffusion(p, DriveParams(0.0, 0.0), Environment::at(0.0, p)).d;
    Eigen::Matrix<double, 6, 1> diag;
    diag << 5, 5, 1, 1, 1, 1;
    EXPECT_LT((d - Mat6(diag.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildDiffusion, SqueezedCavityBlockAmplitudeQuadrature) {
    const SystemParams p = defaults();
    const Mat6 d = build_diffusion(p, DriveParams(2.0, 0.0), Environment::at(0.0, p)).d;
    EXPECT_NEAR(d(0, 0), 5.0 * std::exp(4.0), 1e-12 * d(0, 0));
    EXPECT_NEAR(d(1, 1), 5.0 * std::exp(-4.0), 1e-12);
    EXPECT_EQ(d(0, 1), 0.0);
    // operator-moment oracle
    const Eigen::Matrix2d ref = oracle::cavity_diffusion(5.0, 2.0, 0.0);
    EXPECT_LT((d.block<2, 2>(0, 0) - ref).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(BuildDiffusion, QuarterTurnPhaseGivesHyperbolicBlock) {
    const SystemParams p = defaults();
    const Mat6 d = build_diffusion(p, DriveParams(1.0, std::numbers::pi / 2), Environment::at(0.0, p)).d;
    EXPECT_NEAR(d(0, 0), 5.0 * std::cosh(2.0), 1e-12);
    EXPECT_NEAR(d(1, 1), 5.0 * std::cosh(2.0), 1e-12);
    EXPECT_NEAR(d(0, 1), 5.0 * std::sinh(2.0), 1e-12);
    EXPECT_EQ(d(0, 1), d(1, 0));
}

TEST(BuildDiffusion, AgreesWithMomentTableAndStochasticSampling) {
    const SystemParams p = defaults();
    for (double r : {0.3, 1.0}) {
        for (double theta : {0.0, 0.7, 2.0, 4.5}) {
            const Mat6 d = build_diffusion(p, DriveParams(r, theta), Environment::at(0.0, p)).d;
            const Eigen::Matrix2d exact = oracle::cavity_diffusion(p.kappa_a, r, theta);
            EXPECT_LT((d.block<2, 2>(0, 0) - exact).cwiseAbs().maxCoeff(), 1e-12);
            const Eigen::Matrix2d mc = oracle::cavity_diffusion_sampled(p.kappa_a, r, theta, 400000, 99);
            EXPECT_LT((d.block<2, 2>(0, 0) - mc).cwiseAbs().maxCoeff(), (0.02 * d.block<2, 2>(0, 0).norm()));
        }
    }
}

TEST(BuildDiffusion, ThermalMagnonBlocks) {
    const SystemParams p = defaults();
    const Environment env = Environment::with_occupations(0.1, 0.25, 2.0);
    const Mat6 d = build_diffusion(p, DriveParams(0.0, 0.0), env).d;
    EXPECT_DOUBLE_EQ(d(2, 2), 2.0 * 1.0 * 0.75);
    EXPECT_DOUBLE_EQ(d(5, 5), 2.0 * 1.0 * 2.5);
    EXPECT_EQ(d(2, 3), 0.0);
}

TEST(BuildDiffusion, StructuralProperties) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rr(0.0, 3.0), th(-10.0, 10.0), tt(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = random_params(rng);
        const double r = rr(rng), theta = th(rng);
        const Environment env = Environment::at(tt(rng), p);
        const Mat6 d = build_diffusion(p, DriveParams(r, theta), env).d;
        EXPECT_EQ(d, d.transpose());
        EXPECT_TRUE((d.block<2, 4>(0, 2).isZero(0.0)));
        EXPECT_TRUE((d.block<2, 2>(2, 4).isZero(0.0)));
        Eigen::SelfAdjointEigenSolver<Mat6> es(d);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12 * std::max(1.0, d.maxCoeff()));
        // 2 pi periodicity
        const Mat6 d2 = build_diffusion(p, DriveParams(r, theta + 2 * std::numbers::pi), env).d;
        EXPECT_LT((d - d2).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, d.maxCoeff()));
        // minimum-uncertainty bath at zero temperature
        const Mat6 d0 = build_diffusion(p, DriveParams(r, theta), Environment::at(0.0, p)).d;
        const double det = d0.block<2, 2>(0, 0).determinant() / std::pow(2.0 * p.kappa_a, 2);
        EXPECT_NEAR(det, 0.25, 1e-9 * std::cosh(2 * r) * std::cosh(2 * r));
    }
}

TEST(BuildDiffusion, PhaseShiftIsAQuadratureRotation) {
    const SystemParams p = defaults();
    const Environment env = Environment::at(0.05, p);
    const double phi = 0.3;
    const Mat6 r = quadrature_rotation(phi);
    for (double theta : {0.0, 1.0, 3.0}) {
        const Mat6 d = build_diffusion(p, DriveParams(1.2, theta), env).d;
        // R(phi) D(theta) R(phi)^T = D(theta + 2 phi); equivalently R(-phi) D(theta) R(-phi)^T = D(theta - 2 phi)
        const Mat6 plus = build_diffusion(p, DriveParams(1.2, theta + 2 * phi), env).d;
        const Mat6 minus = build_diffusion(p, DriveParams(1.2, theta - 2 * phi), env).d;
        EXPECT_LT((r * d * r.transpose() - plus).cwiseAbs().maxCoeff(), 1e-12);
        const Mat6 ri = quadrature_rotation(-phi);
        EXPECT_LT((ri * d * ri.transpose() - minus).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(StabilityCheck, DiagonalDriftMarginIsSlowestDecay) {
    SystemParams p = defaults();
    p.g1 = p.g2 = 0.0;
    p.kappa_m2 = 0.5;
    const StabilityReport s = stability_check(build_drift(Detunings{}, p));
    EXPECT_TRUE(s.stable);
    EXPECT_NEAR(s.max_real_part, -0.5, 1e-12);
    EXPECT_NEAR(s.margin, 0.5, 1e-12);
}

TEST(StabilityCheck, ReferenceSystemIsStable) {
    const SystemParams p = defaults();
    const DriftMatrix a = build_drift(detunings_from(p), p);
    const StabilityReport s = stability_check(a);
    EXPECT_TRUE(s.stable);
    // oracle: complex eigenvalues from a general dense solver on the complexified matrix
    Eigen::ComplexEigenSolver<Eigen::Matrix<std::complex<double>, 6, 6>> ces(a.a.cast<std::complex<double>>());
    double max_re = -1e300;
    for (int i = 0; i < 6; ++i) max_re = std::max(max_re, ces.eigenvalues()(i).real());
    EXPECT_NEAR(s.max_real_part, max_re, 1e-9);
    // the dark combination decays at the bare magnon rate
    EXPECT_NEAR(s.max_real_part, -1.0, 1e-9);
}

TEST(StabilityCheck, NegativeDampingIsUnstable) {
    SystemParams p = defaults();
    p.kappa_a = -5.0;
    const StabilityReport s = stability_check(build_drift(Detunings{}, p));
    EXPECT_FALSE(s.stable);
    EXPECT_GT(s.max_real_part, 0.0);
}

TEST(StabilityCheck, MarginalDriftIsNotStable) {
    DriftMatrix a;
    a.a = -Mat6::Identity();
    a.a(3, 3) = -1e-12;
    EXPECT_FALSE(stability_check(a).stable);
}

TEST(StabilityCheck, NonFiniteDriftIsAnError) {
    DriftMatrix a;
    a.a = -Mat6::Identity();
    a.a(0, 1) = std::nan("");
    EXPECT_THROW(stability_check(a), NumericalError);
}
