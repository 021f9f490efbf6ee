#include "optpred/hald.hpp"

#include <cmath>

#include "optpred/parallel.hpp"

namespace optpred::hald {

double hamiltonian(const HaldState& s) {
    return 0.5 * (s.q1 * s.q1 + s.q2 * s.q2 + s.p1 * s.p1 + s.p2 * s.p2 + s.p1 * s.p1 * s.p2 * s.p2);
}

HaldDerivative full_rhs(const HaldState& s) {
    HaldDerivative d;
    d.q1 = s.p1 + s.p1 * s.p2 * s.p2;
    d.p1 = -s.q1;
    d.q2 = s.p2 + s.p2 * s.p1 * s.p1;
    d.p2 = -s.q2;
    return d;
}

ReducedDerivative galerkin_rhs(const HaldReducedState& r) { return {r.p1, -r.q1}; }

ReducedDerivative op_rhs(const HaldReducedState& r, Temperature T) {
    const double e_p2sq = T.value() / (1.0 + r.p1 * r.p1);
    return {r.p1 + r.p1 * e_p2sq, -r.q1};
}

double renormalized_hamiltonian(const HaldReducedState& r, Temperature T) {
    return 0.5 * (r.q1 * r.q1 + r.p1 * r.p1) + 0.5 * T.value() * std::log1p(r.p1 * r.p1);
}

HaldState sample_conditional(const HaldReducedState& r, Temperature T, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    HaldState s;
    s.q1 = r.q1;
    s.p1 = r.p1;
    s.q2 = std::sqrt(T.value()) * normal(rng);
    s.p2 = std::sqrt(T.value() / (1.0 + r.p1 * r.p1)) * normal(rng);
    return s;
}

integrate::StateVector to_vector(const HaldState& s) { return {s.q1, s.p1, s.q2, s.p2}; }

HaldState from_vector(std::span<const double> y) {
    HaldState s;
    s.q1 = y[0];
    s.p1 = y[1];
    s.q2 = y[2];
    s.p2 = y[3];
    return s;
}

integrate::Rhs full_system() {
    return [](double, std::span<const double> y, std::span<double> dy) {
        const auto d = full_rhs(from_vector(y));
        dy[0] = d.q1;
        dy[1] = d.p1;
        dy[2] = d.q2;
        dy[3] = d.p2;
    };
}

integrate::Rhs galerkin_system() {
    return [](double, std::span<const double> y, std::span<double> dy) {
        const auto d = galerkin_rhs({y[0], y[1]});
        dy[0] = d.q1;
        dy[1] = d.p1;
    };
}

integrate::Rhs op_system(Temperature T) {
    return [T](double, std::span<const double> y, std::span<double> dy) {
        const auto d = op_rhs({y[0], y[1]}, T);
        dy[0] = d.q1;
        dy[1] = d.p1;
    };
}

std::vector<HaldState> full_trajectory(const HaldState& s0, std::span<const double> times,
                                       const integrate::IntegratorConfig& config) {
    const auto y0 = to_vector(s0);
    const auto traj = integrate::adaptive_advance(full_system(), 0.0, y0, times, config);
    std::vector<HaldState> out;
    out.reserve(traj.states.size());
    for (const auto& y : traj.states) out.push_back(from_vector(y));
    return out;
}

namespace {

ReducedTrajectory reduced_trajectory(const integrate::Rhs& rhs, const HaldReducedState& r0,
                                     std::span<const double> times, const integrate::IntegratorConfig& config) {
    const integrate::StateVector y0{r0.q1, r0.p1};
    const auto traj = integrate::adaptive_advance(rhs, 0.0, y0, times, config);
    ReducedTrajectory out;
    out.times = traj.times;
    for (const auto& y : traj.states) out.states.push_back({y[0], y[1]});
    return out;
}

}  // namespace

ReducedTrajectory galerkin_trajectory(const HaldReducedState& r0, std::span<const double> times,
                                      const integrate::IntegratorConfig& config) {
    return reduced_trajectory(galerkin_system(), r0, times, config);
}

ReducedTrajectory op_trajectory(const HaldReducedState& r0, Temperature T, std::span<const double> times,
                                const integrate::IntegratorConfig& config) {
    return reduced_trajectory(op_system(T), r0, times, config);
}

double MeanTrajectory::amplitude(std::size_t i) const { return std::hypot(mean_q1[i], mean_p1[i]); }

MeanTrajectory ensemble_mean_trajectory(const HaldReducedState& r0, Temperature T, std::size_t n,
                                        std::span<const double> times, std::uint64_t seed,
                                        const integrate::IntegratorConfig& config, unsigned workers) {
    if (n < 1) throw std::invalid_argument("ensemble size must be >= 1");
    const std::size_t nt = times.size();
    std::vector<std::vector<HaldState>> runs(n);
    parallel_for(n, workers, [&](std::size_t i) {
        auto rng = make_stream(seed, i);
        const HaldState s0 = sample_conditional(r0, T, rng);
        try {
            runs[i] = full_trajectory(s0, times, config);
        } catch (const integrate::IntegrationError& e) {
            throw RealizationError(i, e.what());
        }
    });

    MeanTrajectory m;
    m.times.assign(times.begin(), times.end());
    m.ensemble_size = n;
    m.mean_q1.assign(nt, 0.0);
    m.mean_p1.assign(nt, 0.0);
    m.stderr_q1.assign(nt, 0.0);
    m.stderr_p1.assign(nt, 0.0);
    for (std::size_t j = 0; j < nt; ++j) {
        double sq = 0, sp = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sq += runs[i][j].q1;
            sp += runs[i][j].p1;
        }
        const double mq = sq / n, mp = sp / n;
        double vq = 0, vp = 0;
        for (std::size_t i = 0; i < n; ++i) {
            vq += (runs[i][j].q1 - mq) * (runs[i][j].q1 - mq);
            vp += (runs[i][j].p1 - mp) * (runs[i][j].p1 - mp);
        }
        m.mean_q1[j] = mq;
        m.mean_p1[j] = mp;
        if (n > 1) {
            m.stderr_q1[j] = std::sqrt(vq / (n - 1) / n);
            m.stderr_p1[j] = std::sqrt(vp / (n - 1) / n);
        }
    }
    return m;
}

}  // namespace optpred::hald
