#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "optpred/hald.hpp"
#include "optpred/parallel.hpp"

using namespace optpred::hald;

namespace {

const optpred::integrate::IntegratorConfig kTight{1e-8, 1e-2, 1e-12, 0.5};

std::vector<double> grid(double t_end, double dt) {
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t i = 0; i <= n; ++i) t.push_back(i * dt);
    return t;
}

// -T log of the hidden-coordinate partition function relative to p1 = 0,
// by trapezoid quadrature over p2 (the q2 integral cancels).
double renormalized_by_quadrature(double q1, double p1, double T) {
    auto z = [&](double p) {
        const double L = 12.0 * std::sqrt(T);
        const int n = 20000;
        const double d = 2 * L / n;
        double s = 0;
        for (int i = 0; i <= n; ++i) {
            const double p2 = -L + i * d;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            s += w * std::exp(-0.5 * (p2 * p2 + p * p * p2 * p2) / T);
        }
        return s * d;
    };
    return 0.5 * (q1 * q1 + p1 * p1) - T * std::log(z(p1) / z(0.0));
}

}  // namespace

TEST(Hald, HamiltonianValues) {
    EXPECT_EQ(hamiltonian({}), 0.0);
    EXPECT_EQ(hamiltonian({1, 0, 0, 0}), 0.5);
    EXPECT_EQ(hamiltonian({0, 0, 1, 1}), 1.5);
}

TEST(Hald, FullRhsValues) {
    const auto a = full_rhs({1, 0, 0, 0});
    EXPECT_EQ(a.q1, 0.0);
    EXPECT_EQ(a.p1, -1.0);
    EXPECT_EQ(a.q2, 0.0);
    EXPECT_EQ(a.p2, 0.0);
    const auto b = full_rhs({0, 0, 1, 1});
    EXPECT_EQ(b.q1, 2.0);
    EXPECT_EQ(b.p1, 0.0);
    EXPECT_EQ(b.q2, 2.0);
    EXPECT_EQ(b.p2, 0.0);
}

TEST(Hald, FullRhsIsHamiltonianGradient) {
    const HaldState s{0.3, -0.7, 1.1, 0.4};
    const double e = 1e-6;
    auto dH = [&](int which) {
        HaldState a = s, b = s;
        double* pa[] = {&a.q1, &a.q2, &a.p1, &a.p2};
        double* pb[] = {&b.q1, &b.q2, &b.p1, &b.p2};
        *pa[which] += e;
        *pb[which] -= e;
        return (hamiltonian(a) - hamiltonian(b)) / (2 * e);
    };
    const auto d = full_rhs(s);
    EXPECT_NEAR(d.q1, dH(2), 1e-8);
    EXPECT_NEAR(d.q2, dH(3), 1e-8);
    EXPECT_NEAR(d.p1, -dH(0), 1e-8);
    EXPECT_NEAR(d.p2, -dH(1), 1e-8);
}

TEST(Hald, OpRhsValues) {
    const Temperature T(1.0);
    const auto a = op_rhs({0, 1}, T);
    EXPECT_DOUBLE_EQ(a.q1, 1.5);
    EXPECT_EQ(a.p1, 0.0);
    const auto b = op_rhs({1, 0}, T);
    EXPECT_EQ(b.q1, 0.0);
    EXPECT_EQ(b.p1, -1.0);
}

TEST(Hald, OpRhsIsConditionalExpectation) {
    const Temperature T(0.8);
    const HaldReducedState r{0.4, 1.3};
    auto rng = optpred::make_stream(7, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double v = full_rhs(sample_conditional(r, T, rng)).q1;
        s += v;
        s2 += v * v;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - op_rhs(r, T).q1), 4 * se);
}

TEST(Hald, GalerkinIsRotation) {
    const auto tr = galerkin_trajectory({1, 0}, std::vector<double>{0.0, 1.0, M_PI / 2}, kTight);
    EXPECT_NEAR(tr.states[1].q1, std::cos(1.0), 1e-7);
    EXPECT_NEAR(tr.states[1].p1, -std::sin(1.0), 1e-7);
    EXPECT_NEAR(tr.states[2].q1, 0.0, 1e-7);
    EXPECT_NEAR(tr.states[2].p1, -1.0, 1e-7);
}

TEST(Hald, RenormalizedHamiltonian) {
    const Temperature T(1.0);
    EXPECT_NEAR(renormalized_hamiltonian({0, 1}, T), 0.846574, 1e-6);
    EXPECT_EQ(renormalized_hamiltonian({0, 0}, T), 0.0);
    for (double p1 : {0.3, 1.0, 2.5})
        for (double t : {0.5, 1.0, 2.0})
            EXPECT_NEAR(renormalized_hamiltonian({0.7, p1}, Temperature(t)), renormalized_by_quadrature(0.7, p1, t),
                        1e-8);
}

TEST(Hald, RejectsNonPositiveTemperature) {
    EXPECT_THROW(Temperature(0.0), std::invalid_argument);
    EXPECT_THROW(Temperature(-1.0), std::invalid_argument);
}

TEST(Hald, ConditionalSamplingMoments) {
    const Temperature T(1.5);
    const HaldReducedState r{0.2, 2.0};
    auto rng = optpred::make_stream(3, 1);
    const int n = 40000;
    double mq = 0, mp = 0, vq = 0, vp = 0;
    for (int i = 0; i < n; ++i) {
        const auto s = sample_conditional(r, T, rng);
        EXPECT_EQ(s.q1, r.q1);
        EXPECT_EQ(s.p1, r.p1);
        mq += s.q2;
        mp += s.p2;
        vq += s.q2 * s.q2;
        vp += s.p2 * s.p2;
    }
    mq /= n;
    mp /= n;
    vq /= n;
    vp /= n;
    const double var_q = 1.5, var_p = 1.5 / 5.0;
    EXPECT_LT(std::abs(mq), 4 * std::sqrt(var_q / n));
    EXPECT_LT(std::abs(mp), 4 * std::sqrt(var_p / n));
    EXPECT_LT(std::abs(vq - var_q), 4 * var_q * std::sqrt(2.0 / n));
    EXPECT_LT(std::abs(vp - var_p), 4 * var_p * std::sqrt(2.0 / n));
}

TEST(Hald, ConservationOverLongRun) {
    const auto times = grid(50.0, 1.0);
    const HaldState s0{1.0, 0.5, 1.0, -0.8};
    const double h0 = hamiltonian(s0);
    for (const auto& s : full_trajectory(s0, times, kTight)) EXPECT_LT(std::abs(hamiltonian(s) / h0 - 1.0), 1e-6);

    const Temperature T(1.0);
    const HaldReducedState r0{1.0, 1.0};
    const double r_h0 = renormalized_hamiltonian(r0, T);
    for (const auto& r : op_trajectory(r0, T, times, kTight).states)
        EXPECT_LT(std::abs(renormalized_hamiltonian(r, T) / r_h0 - 1.0), 1e-6);
}

TEST(Hald, HiddenAtRestGivesRotation) {
    const auto times = grid(6.0, 0.5);
    const auto tr = full_trajectory({1.0, 0.0, 0.0, 0.0}, times, kTight);
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_EQ(tr[i].q2, 0.0);
        EXPECT_EQ(tr[i].p2, 0.0);
        EXPECT_NEAR(tr[i].q1, std::cos(times[i]), 1e-6);
        EXPECT_NEAR(tr[i].p1, -std::sin(times[i]), 1e-6);
    }
}

TEST(Hald, EnsembleMeanStartsAtInitialState) {
    const auto times = grid(2.0, 0.5);
    const auto m = ensemble_mean_trajectory({1, 1}, Temperature(1.0), 20, times, 5, kTight);
    EXPECT_EQ(m.mean_q1[0], 1.0);
    EXPECT_EQ(m.mean_p1[0], 1.0);
    EXPECT_EQ(m.stderr_q1[0], 0.0);
    EXPECT_DOUBLE_EQ(m.amplitude(0), std::sqrt(2.0));
    EXPECT_EQ(m.ensemble_size, 20u);
}

TEST(Hald, EnsembleSizeOfOneMatchesSingleRealization) {
    const auto times = grid(3.0, 0.5);
    const auto m = ensemble_mean_trajectory({0.5, -1}, Temperature(1.0), 1, times, 11, kTight);
    auto rng = optpred::make_stream(11, 0);
    const auto s0 = sample_conditional({0.5, -1}, Temperature(1.0), rng);
    const auto tr = full_trajectory(s0, times, kTight);
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_EQ(m.mean_q1[i], tr[i].q1);
        EXPECT_EQ(m.mean_p1[i], tr[i].p1);
    }
}

TEST(Hald, EnsembleIsIndependentOfWorkerCount) {
    const auto times = grid(5.0, 0.5);
    const auto a = ensemble_mean_trajectory({1, 1}, Temperature(1.0), 40, times, 9, kTight, 1);
    const auto b = ensemble_mean_trajectory({1, 1}, Temperature(1.0), 40, times, 9, kTight, 4);
    EXPECT_EQ(a.mean_q1, b.mean_q1);
    EXPECT_EQ(a.mean_p1, b.mean_p1);
    EXPECT_EQ(a.stderr_q1, b.stderr_q1);
}

TEST(Hald, EnsembleRejectsEmpty) {
    EXPECT_THROW(ensemble_mean_trajectory({1, 1}, Temperature(1.0), 0, std::vector<double>{0.0}, 1, kTight),
                 std::invalid_argument);
}
