#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cavmag/measures.hpp"
#include "cavmag/steadystate.hpp"
#include "cavmag/verify.hpp"

using namespace cavmag;

namespace {

struct Pipeline {
    SystemParams params;
    DriftMatrix drift;
    DiffusionMatrix diffusion;
};

Pipeline reference(double r = 2.0, double theta = 0.0, double temperature = 0.020) {
    Pipeline out;
    out.params = reference_defaults().params;
    out.drift = build_drift(detunings_from(out.params), out.params);
    out.diffusion = build_diffusion(out.params, DriveParams(r, theta), Environment::at(temperature, out.params));
    return out;
}

double max_abs(const Mat6& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(CovarianceMatrix, StoredSymmetrised) {
    Mat6 m = Mat6::Identity();
    m(0, 1) = 1.0;
    const CovarianceMatrix v(m);
    EXPECT_EQ(v(0, 1), 0.5);
    EXPECT_EQ(v(1, 0), 0.5);
}

TEST(CovarianceMatrix, VacuumIsPhysicalAndMinimal) {
    const CovarianceMatrix v = CovarianceMatrix::vacuum();
    EXPECT_TRUE(v.is_physical());
    EXPECT_NEAR(v.symplectic_eigenvalues().minCoeff(), 0.5, 1e-15);
    EXPECT_FALSE(CovarianceMatrix(0.4 * Mat6::Identity()).is_physical());
}

TEST(SolveLyapunov, DecoupledVacuumGivesHalfIdentity) {
    Pipeline p = reference(0.0, 0.0, 0.0);
    p.params.g1 = p.params.g2 = 0.0;
    p.drift = build_drift(Detunings{}, p.params);
    EXPECT_LT(max_abs(solve_lyapunov(p.drift, p.diffusion).matrix() - 0.5 * Mat6::Identity()), 1e-14);
    EXPECT_LT(max_abs(solve_lyapunov_kron(p.drift, p.diffusion).matrix() - 0.5 * Mat6::Identity()), 1e-14);
}

TEST(SolveLyapunov, DecoupledThermalMagnonsSitAtBathOccupation) {
    SystemParams p = reference_defaults().params;
    p.g1 = p.g2 = 0.0;
    const Environment env = Environment::with_occupations(0.3, 0.7, 1.9);
    const DriftMatrix a = build_drift(Detunings{3.0, -2.0, 1.0}, p);
    const DiffusionMatrix d = build_diffusion(p, DriveParams(0.0, 0.0), env);
    const CovarianceMatrix v = solve_lyapunov(a, d);
    EXPECT_LT((v.matrix().block<2, 2>(2, 2) - 1.2 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((v.matrix().block<2, 2>(4, 4) - 2.4 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SolveLyapunov, ReferenceMagnonVariance) {
    const Pipeline p = reference();
    const CovarianceMatrix v = solve_lyapunov(p.drift, p.diffusion);
    // 0.5 * 10^(-0.227): the quoted 2.27 dB
    EXPECT_NEAR(v(2, 2), 0.5 * std::pow(10.0, -0.227), 5e-4);
    // independent solve (scipy Bartels-Stewart), frozen
    EXPECT_NEAR(v(2, 2), 0.29675272028908356, 1e-11);
    EXPECT_LT(max_abs(v.matrix() - solve_lyapunov_kron(p.drift, p.diffusion).matrix()), 1e-9);
}

TEST(SolveLyapunov, ResidualBoundAndPhysicality) {
    for (double r : {0.0, 0.5, 2.0, 4.0}) {
        for (double t : {0.0, 0.02, 0.5}) {
            const Pipeline p = reference(r, 1.0, t);
            const LyapunovReport rep = solve_lyapunov_report(p.drift, p.diffusion);
            EXPECT_LT(rep.residual, kLyapunovResidualTolerance * rep.diffusion_max);
            EXPECT_TRUE(rep.cov.is_physical()) << "r=" << r << " T=" << t;
            EXPECT_FALSE(rep.ill_conditioned);
        }
    }
}

TEST(SolveLyapunov, FlagsExtremeSqueezingAsIllConditioned) {
    const Pipeline p = reference(6.5);
    const LyapunovReport rep = solve_lyapunov_report(p.drift, p.diffusion);
    EXPECT_TRUE(rep.ill_conditioned);
}

TEST(SolveLyapunov, UnstableDriftHasNoSteadyState) {
    Pipeline p = reference();
    p.params.kappa_a = -5.0;
    p.drift = build_drift(Detunings{}, p.params);
    EXPECT_THROW(solve_lyapunov(p.drift, p.diffusion), NoSteadyState);
    EXPECT_THROW(solve_lyapunov_kron(p.drift, p.diffusion), NoSteadyState);
}

TEST(SolveLyapunov, SchurAndKroneckerAgreeOnRandomStableSystems) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const LyapunovCase c = random_lyapunov_case(seed);
        ASSERT_TRUE(stability_check(c.a).stable);
        const LyapunovReport s = solve_lyapunov_report(c.a, c.d);
        const LyapunovReport k = solve_lyapunov_kron_report(c.a, c.d);
        EXPECT_LT(max_abs(s.cov.matrix() - k.cov.matrix()), 1e-9) << "seed " << seed;
        EXPECT_LT(s.residual, 1e-10 * s.diffusion_max);
        EXPECT_LT(k.residual, 1e-10 * k.diffusion_max);
    }
}

TEST(SolveLyapunov, LabelSwapPermutesCovariance) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.2, 3.0), det(-10.0, 10.0);
    Eigen::PermutationMatrix<6> swap;
    swap.indices() << 0, 1, 4, 5, 2, 3;
    for (int i = 0; i < 20; ++i) {
        SystemParams p = reference_defaults().params;
        p.omega_m1 = p.omega_s + det(rng);
        p.omega_m2 = p.omega_s + det(rng);
        p.kappa_m1 = u(rng);
        p.kappa_m2 = u(rng);
        p.g1 = 10.0 * u(rng);
        p.g2 = 10.0 * u(rng);
        const Environment env = Environment::with_occupations(0.1, u(rng), u(rng));
        SystemParams q = p;
        std::swap(q.omega_m1, q.omega_m2);
        std::swap(q.kappa_m1, q.kappa_m2);
        std::swap(q.g1, q.g2);
        const Environment env_q = Environment::with_occupations(0.1, env.n_m2(), env.n_m1());
        const DriveParams drive(1.3, 0.4);
        const CovarianceMatrix v = solve_lyapunov(build_drift(detunings_from(p), p), build_diffusion(p, drive, env));
        const CovarianceMatrix w = solve_lyapunov(build_drift(detunings_from(q), q), build_diffusion(q, drive, env_q));
        EXPECT_LT(max_abs(swap * v.matrix() * swap.transpose() - w.matrix()), 1e-11);
    }
}

TEST(SolveLyapunov, SqueezingPhaseRotatesCovariance) {
    SystemParams p = reference_defaults().params;
    p.omega_a += 2.0;
    p.omega_m1 -= 1.0;
    p.omega_m2 += 0.5;
    const Environment env = Environment::at(0.05, p);
    const DriftMatrix a = build_drift(detunings_from(p), p);
    const CovarianceMatrix v0 = solve_lyapunov(a, build_diffusion(p, DriveParams(2.0, 0.0), env));
    for (double theta : {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi}) {
        const CovarianceMatrix vt = solve_lyapunov(a, build_diffusion(p, DriveParams(2.0, theta), env));
        const Mat6 r = quadrature_rotation(theta / 2.0);
        EXPECT_LT(max_abs(r * v0.matrix() * r.transpose() - vt.matrix()), 1e-10);
    }
}

TEST(PropagateCovariance, PureDecayMatchesClosedForm) {
    DriftMatrix a;
    const double kappa = 2.0;  // internal units
    a.a = -kappa * Mat6::Identity();
    const DiffusionMatrix d;
    Mat6 m = Mat6::Identity();
    m(0, 3) = m(3, 0) = 0.2;
    const CovarianceMatrix v0(m);
    const double t = units::internal_to_seconds(1.0 / kappa);
    const Mat6 expected = std::exp(-2.0) * v0.matrix();
    const auto rel_error = [&](double dt_internal) {
        const CovarianceMatrix v = propagate_covariance(a, d, v0, t, units::internal_to_seconds(dt_internal));
        return ((v.matrix() - expected).cwiseAbs().array() / expected.cwiseAbs().array().max(1e-300)).maxCoeff();
    };
    // RK4 global error for rate 2 kappa over 50 steps is about 50 (0.04)^5 / 120
    const double coarse = rel_error(0.01), fine = rel_error(0.005);
    EXPECT_LT(coarse, 6e-8);
    EXPECT_NEAR(coarse / fine, 16.0, 0.5);
}

TEST(PropagateCovariance, ConvergesToSteadyState) {
    const Pipeline p = reference();
    const double t = units::internal_to_seconds(50.0 / p.params.kappa_m1);
    const double dt = units::internal_to_seconds(0.002);
    const CovarianceMatrix v = propagate_covariance(p.drift, p.diffusion, CovarianceMatrix::vacuum(), t, dt);
    EXPECT_LT(max_abs(v.matrix() - solve_lyapunov(p.drift, p.diffusion).matrix()), 1e-6);
}

TEST(PropagateCovariance, SteadyStateIsStationary) {
    const Pipeline p = reference(1.5, 0.8, 0.1);
    const CovarianceMatrix vs = solve_lyapunov(p.drift, p.diffusion);
    const double t = units::internal_to_seconds(10.0 / p.params.kappa_m1);
    const double dt = units::internal_to_seconds(0.002);
    double worst = 0.0;
    const CovarianceMatrix v = propagate_covariance(p.drift, p.diffusion, vs, t, dt,
        [&](double, const CovarianceMatrix& cur) { worst = std::max(worst, max_abs(cur.matrix() - vs.matrix())); });
    EXPECT_LT(worst, 1e-8);
    EXPECT_LT(max_abs(v.matrix() - vs.matrix()), 1e-8);
}

TEST(PropagateCovariance, DarkModeStaysAtVacuumNoise) {
    const Pipeline p = reference(2.0, 0.0, 0.0);
    const double t = units::internal_to_seconds(20.0);
    const double dt = units::internal_to_seconds(0.002);
    double worst = 0.0;
    int samples = 0;
    propagate_covariance(p.drift, p.diffusion, CovarianceMatrix::vacuum(), t, dt,
                         [&](double, const CovarianceMatrix& v) {
                             worst = std::max(worst, std::abs(collective_variances(v).var_my - 0.5));
                             ++samples;
                         });
    EXPECT_EQ(samples, 10000);
    EXPECT_LT(worst, 1e-8);
}

TEST(PropagateCovariance, ObserverTimesEndExactlyAtFinalTime) {
    const Pipeline p = reference();
    const double t = units::internal_to_seconds(1.0);
    double last = -1.0;
    int steps = 0;
    propagate_covariance(p.drift, p.diffusion, CovarianceMatrix::vacuum(), t, units::internal_to_seconds(0.0015),
                         [&](double ts, const CovarianceMatrix&) { last = ts, ++steps; });
    EXPECT_EQ(steps, 667);
    EXPECT_NEAR(last, t, 1e-15 * t + 1e-22);
}

TEST(PropagateCovariance, GuardsStepSizeAndArguments) {
    const Pipeline p = reference();
    const CovarianceMatrix v0 = CovarianceMatrix::vacuum();
    EXPECT_THROW(propagate_covariance(p.drift, p.diffusion, v0, 1e-6, units::internal_to_seconds(0.01)), DomainError);
    EXPECT_THROW(propagate_covariance(p.drift, p.diffusion, v0, 1e-6, 0.0), DomainError);
    EXPECT_THROW(propagate_covariance(p.drift, p.diffusion, v0, -1.0, 1e-12), DomainError);
    const CovarianceMatrix same = propagate_covariance(p.drift, p.diffusion, v0, 0.0, 1e-12);
    EXPECT_EQ(same.matrix(), v0.matrix());
}
