#include <gtest/gtest.h>

#include <cmath>

#include "optpred/dynamics.hpp"
#include "optpred/integrate.hpp"
#include "optpred/parallel.hpp"
#include "oracles.hpp"

using namespace optpred;
using namespace optpred::dynamics;
using spectral::Lattice;

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_abs(std::span<const Complex> a) {
    double d = 0.0;
    for (auto v : a) d = std::max(d, std::abs(v));
    return d;
}

const FlowParams kParams{1.0, 1.0, 1};
const ModePartition kDesk{2, 4};

}  // namespace

TEST(Dynamics, MatchesVorticityForm) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(2024, 0);
    for (int n = 0; n < 20; ++n) {
        const auto f = oracle::random_field(4, rng);
        const auto mine = eng.full_rhs(f);
        const auto ref = oracle::vorticity_form_rhs(f, kParams);
        EXPECT_LT(max_abs_diff(mine.amplitudes(), ref), 1e-12 * std::max(1.0, max_abs(ref)));
    }
}

TEST(Dynamics, MatchesVelocityFormDoubleSum) {
    const FlowParams p{0.7, 1.0, 1};
    const AveragedEuler eng({1, 3}, p);
    auto rng = make_stream(7, 3);
    for (int n = 0; n < 5; ++n) {
        const auto f = oracle::random_field(3, rng);
        const auto mine = eng.full_rhs(f);
        const auto ref = oracle::velocity_form_rhs(f, p);
        EXPECT_LT(max_abs_diff(mine.amplitudes(), ref), 1e-12 * std::max(1.0, max_abs(ref)));
    }
}

TEST(Dynamics, DecompositionIdentity) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(11, 0);
    for (int n = 0; n < 100; ++n) {
        const auto f = oracle::random_field(4, rng);
        const auto full = eng.full_rhs(f);
        const auto d = eng.decompose(f);
        ASSERT_EQ(d.indices.size(), eng.resolved_indices().size());
        for (std::size_t j = 0; j < d.indices.size(); ++j) {
            const Complex sum = d.g1[j] + d.g2[j] + d.g3[j];
            EXPECT_LT(std::abs(sum - full.amplitude(d.indices[j])), 1e-12);
        }
    }
}

TEST(Dynamics, GroupsVanishOnTheirSupport) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(12, 0);
    const auto f = oracle::random_field(4, rng);
    const auto resolved_only = f.restricted([](WaveVector k) { return kDesk.resolved(k); });
    const auto d = eng.decompose(resolved_only);
    for (std::size_t j = 0; j < d.indices.size(); ++j) {
        EXPECT_EQ(d.g2[j], Complex{});
        EXPECT_EQ(d.g3[j], Complex{});
    }
    const auto sampled_only = f.restricted([](WaveVector k) { return kDesk.sampled(k); });
    const auto d2 = eng.decompose(sampled_only);
    for (std::size_t j = 0; j < d2.indices.size(); ++j) {
        EXPECT_EQ(d2.g1[j], Complex{});
        EXPECT_EQ(d2.g2[j], Complex{});
    }
}

TEST(Dynamics, ConservesEnergyAndAEnstrophy) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(5, 0);
    const auto f0 = spectral::sample_equilibrium(4, kParams, [](WaveVector) { return true; }, rng);
    std::vector<std::size_t> all(f0.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const integrate::Rhs rhs = [&](double, std::span<const double> y, std::span<double> dy) { eng.rhs_packed(y, dy); };
    const std::vector<double> times{0.0, 5.0, 10.0};
    const auto traj = integrate::adaptive_advance(rhs, 0.0, f0.pack(all), times, {1e-8, 1e-2, 1e-12, 0.5});
    const double e0 = energy(f0, kParams), z0 = a_enstrophy(f0, kParams);
    for (const auto& y : traj.states) {
        SpectralField f(f0.lattice_ptr());
        f.unpack(all, y);
        EXPECT_LT(std::abs(energy(f, kParams) / e0 - 1.0), 1e-6);
        EXPECT_LT(std::abs(a_enstrophy(f, kParams) / z0 - 1.0), 1e-6);
    }
}

TEST(Dynamics, ResolvedTriadsAloneConserve) {
    // Only resolved modes nonzero: G1 is the whole resolved tendency and its
    // triads are closed in the resolved set, so both invariants are exact
    // quadratic forms with zero time derivative.
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(6, 0);
    const auto f = oracle::random_field(4, rng).restricted([](WaveVector k) { return kDesk.resolved(k); });
    const auto d = eng.decompose(f);
    double de = 0.0, dz = 0.0;
    for (std::size_t j = 0; j < d.indices.size(); ++j) {
        const auto k = d.modes[j];
        const double A = spectral::a_operator(k, kParams);
        const double w = (std::conj(f.amplitude(d.indices[j])) * d.g1[j]).real();
        de += A * w;
        dz += k.norm_sq() * A * A * w;
    }
    EXPECT_NEAR(de, 0.0, 1e-12);
    EXPECT_NEAR(dz, 0.0, 1e-11);
}

TEST(Dynamics, TruncationLocality) {
    // With only resolved modes nonzero, modes beyond |k|_inf = 2m cannot feed
    // the resolved tendency.
    const ModePartition wide{2, 6};
    const AveragedEuler big(wide, kParams), small(kDesk, kParams);
    auto rng = make_stream(8, 0);
    const auto f = oracle::random_field(6, rng).restricted([](WaveVector k) { return k.linf() <= 2; });
    auto g = SpectralField::zeros(4);
    for (std::size_t i = 0; i < g.size(); ++i) g.set_amplitude(i, f.signed_amplitude(g.lattice().modes()[i]));
    const auto rb = big.full_rhs(f);
    const auto rs = small.full_rhs(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.lattice().modes()[i];
        if (k.linf() > 2) continue;
        EXPECT_LT(std::abs(rb.signed_amplitude(k) - rs.amplitude(i)), 1e-12);
    }
}

TEST(Dynamics, RealFieldStaysReal) {
    // Hermitian symmetry is structural; check the velocity view of the RHS.
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(9, 0);
    const auto r = eng.full_rhs(oracle::random_field(4, rng));
    for (const auto& k : r.lattice().modes()) {
        const auto a = r.velocity(k), b = r.velocity(-k);
        EXPECT_EQ(a[0], std::conj(b[0]));
        EXPECT_EQ(a[1], std::conj(b[1]));
    }
}

TEST(Dynamics, FirstOrderConditionalMeanOfG2G3Vanishes) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(31, 0);
    const auto resolved = oracle::random_field(4, rng, 0.3).restricted([](WaveVector k) { return kDesk.resolved(k); });
    const std::size_t n = 4000;
    const auto nr = eng.resolved_indices().size();
    std::vector<Complex> sum(nr), sum_sq_dummy(nr);
    std::vector<double> sq(nr, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto s = make_stream(32, r);
        const auto f = spectral::conditional_sample(resolved, kDesk, kParams, s);
        const auto d = eng.decompose(f);
        for (std::size_t j = 0; j < nr; ++j) {
            const Complex x = d.g2[j] + d.g3[j];
            sum[j] += x;
            sq[j] += std::norm(x);
        }
    }
    for (std::size_t j = 0; j < nr; ++j) {
        const Complex mean = sum[j] / static_cast<double>(n);
        const double var = sq[j] / n - std::norm(mean);
        const double se = std::sqrt(var / n);
        // |mean|^2 / se^2 is chi-square with two degrees of freedom.
        EXPECT_LT(std::abs(mean), 4.0 * se) << "mode " << j;
    }
}

TEST(Dynamics, ApplyLIsLinearInSampledField) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(13, 0);
    const auto u = oracle::random_field(4, rng).restricted([](WaveVector k) { return kDesk.resolved(k); });
    const auto a = oracle::random_field(4, rng).restricted([](WaveVector k) { return kDesk.sampled(k); });
    const auto b = oracle::random_field(4, rng).restricted([](WaveVector k) { return kDesk.sampled(k); });
    const double alpha = 0.37, beta = -1.9;
    SpectralField mix(a.lattice_ptr());
    for (std::size_t i = 0; i < mix.size(); ++i) mix.set_amplitude(i, alpha * a.amplitude(i) + beta * b.amplitude(i));
    const auto la = eng.apply_L(u, a), lb = eng.apply_L(u, b), lm = eng.apply_L(u, mix);
    for (std::size_t j = 0; j < lm.size(); ++j) EXPECT_LT(std::abs(lm[j] - (alpha * la[j] + beta * lb[j])), 1e-12);
    // And it reproduces G2 of the combined field.
    SpectralField f(a.lattice_ptr());
    for (std::size_t i = 0; i < f.size(); ++i) f.set_amplitude(i, u.amplitude(i) + a.amplitude(i));
    const auto d = eng.decompose(f);
    for (std::size_t j = 0; j < la.size(); ++j) EXPECT_LT(std::abs(la[j] - d.g2[j]), 1e-12);
}

TEST(Dynamics, ApplyLRejectsResolvedPerturbation) {
    const AveragedEuler eng(kDesk, kParams);
    auto rng = make_stream(14, 0);
    const auto u = oracle::random_field(4, rng);
    EXPECT_THROW(eng.apply_L(u.restricted([](WaveVector k) { return kDesk.resolved(k); }), u), std::invalid_argument);
}

TEST(Dynamics, GammaZeroCases) {
    const AveragedEuler eng(kDesk, kParams);
    const auto zero = SpectralField::zeros(4);
    for (auto form : {GammaForm::AsPrinted, GammaForm::Balanced})
        for (double g : eng.gamma_diagonal(zero, [](double k) { return 2.0 / k; }, {form, SigmaSource::ResolvedK}))
            EXPECT_EQ(g, 0.0);
    auto rng = make_stream(15, 0);
    const auto u = oracle::random_field(4, rng).restricted([](WaveVector k) { return kDesk.resolved(k); });
    for (double g : eng.gamma_diagonal(u, [](double) { return 0.0; })) EXPECT_EQ(g, 0.0);
}

TEST(Dynamics, PrintedGammaSingleTerm) {
    const ModePartition part{1, 2};
    const FlowParams fp{0.8, 1.3, 1};
    const AveragedEuler eng(part, fp);
    const WaveVector p0{1, 0};
    auto u = SpectralField::zeros(2);
    u.set_amplitude(*u.lattice().canonical_index(p0), Complex{0.6, -0.2});
    const double up2 = std::norm(Complex{0.6, -0.2});
    auto sigma = [](double k) { return 1.9 / k; };
    const auto g = eng.gamma_diagonal(u, sigma, {GammaForm::AsPrinted, SigmaSource::ResolvedK});
    const auto& idx = eng.resolved_indices();
    bool any_nonzero = false;
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const WaveVector k = u.lattice().modes()[idx[j]];
        double expect = 0.0;
        for (WaveVector p : {p0, -p0}) {
            const WaveVector q = k - p;
            if (!part.sampled(q)) continue;
            expect += oracle::printed_gamma_term(k, p, q, sigma(k.norm()), up2, fp);
        }
        EXPECT_NEAR(g[j], expect, 1e-14 * std::max(1.0, std::abs(expect)));
        any_nonzero |= expect != 0.0;
    }
    EXPECT_TRUE(any_nonzero);
}

TEST(Dynamics, PrintedGammaVanishesForParallelWavevectors) {
    // k = (2,0) with p = (1,0) forces q = (1,0), which is resolved; use m=1,
    // bound 2 and target k=(1,0) from p=(-1,0), q=(2,0): q_perp . p = 0.
    const ModePartition part{1, 2};
    const AveragedEuler eng(part, kParams);
    auto u = SpectralField::zeros(2);
    u.set_amplitude(*u.lattice().canonical_index({1, 0}), 1.0);
    const auto g = eng.gamma_diagonal(u, [](double k) { return 1.0 / k; }, {GammaForm::AsPrinted, SigmaSource::ResolvedK});
    const auto& idx = eng.resolved_indices();
    for (std::size_t j = 0; j < idx.size(); ++j)
        if (u.lattice().modes()[idx[j]] == WaveVector{1, 0}) EXPECT_EQ(g[j], 0.0);
}

TEST(Dynamics, BalancedGammaEqualsInjectedVarianceOverTwiceEquilibrium) {
    const FlowParams fp{1.0, 1.0, 1};
    for (const ModePartition part : {ModePartition{1, 2}, kDesk}) {
        const AveragedEuler eng(part, fp);
        auto rng = make_stream(16, static_cast<std::uint64_t>(part.m));
        const auto u = spectral::sample_equilibrium(part.sampled_bound, fp, [&](WaveVector k) { return part.resolved(k); }, rng);
        const WidthFunction sigma = [](double k) { return 1.7 / k; };
        const auto closed = eng.gamma_diagonal(u, sigma, {GammaForm::Balanced, SigmaSource::SampledQ});
        const auto numeric = oracle::balanced_gamma_from_columns(eng, u, sigma);
        ASSERT_EQ(closed.size(), numeric.size());
        for (std::size_t j = 0; j < closed.size(); ++j)
            EXPECT_NEAR(closed[j], numeric[j], 1e-10 * std::max(1.0, numeric[j]));
    }
}

TEST(Dynamics, SingleModeNorms) {
    auto f = SpectralField::zeros(2);
    // u_(1,0) = (0, 1): transverse amplitude along e = (0, -1) is -1.
    const std::vector<std::pair<WaveVector, spectral::Vec2>> v{{{1, 0}, {Complex{0.0}, Complex{1.0}}}};
    f = SpectralField::from_velocities(2, v);
    EXPECT_DOUBLE_EQ(energy(f, kParams), 2.0);
    EXPECT_DOUBLE_EQ(a_enstrophy(f, kParams), 4.0);
    const auto xi = vorticity(f);
    const auto i = *f.lattice().canonical_index({1, 0});
    EXPECT_NEAR(std::abs(xi[i] - Complex{0.0, 1.0}), 0.0, 1e-15);
    EXPECT_EQ(energy(SpectralField::zeros(3), kParams), 0.0);
    EXPECT_EQ(a_enstrophy(SpectralField::zeros(3), kParams), 0.0);
}

TEST(Dynamics, AEnstrophyFromVorticity) {
    auto rng = make_stream(17, 0);
    const auto f = oracle::random_field(3, rng);
    const auto xi = vorticity(f);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double A = spectral::a_operator(f.lattice().modes()[i], kParams);
        s += A * A * std::norm(xi[i]);
    }
    EXPECT_NEAR(s, a_enstrophy(f, kParams), 1e-12 * s);
}

TEST(Dynamics, EquilibriumAEnstrophyPerModeIsT) {
    const FlowParams fp{1.0, 1.7, 1};
    const std::size_t n = 4000;
    const auto lat = Lattice::get(2);
    std::vector<double> s(lat->size(), 0.0), s2(lat->size(), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto rng = make_stream(18, r);
        const auto f = spectral::sample_equilibrium(2, fp, [](WaveVector) { return true; }, rng);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto k = lat->modes()[i];
            const double A = spectral::a_operator(k, fp);
            const double z = k.norm_sq() * A * A * std::norm(f.amplitude(i));
            s[i] += z;
            s2[i] += z * z;
        }
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double mean = s[i] / n;
        const double se = std::sqrt((s2[i] / n - mean * mean) / n);
        EXPECT_LT(std::abs(mean - fp.T), 4.0 * se);
    }
}

TEST(Dynamics, ShearFlowIsSteady) {
    auto f = SpectralField::zeros(4);
    for (int k1 = 1; k1 <= 4; ++k1) f.set_amplitude(*f.lattice().canonical_index({k1, 0}), Complex(1.0 / k1, 0.3 * k1));
    const auto d = full_rhs(f, kDesk, kParams);
    EXPECT_EQ(max_abs(d.amplitudes()), 0.0);
}
