#include "optpred/langevin.hpp"

#include <cmath>
#include <stdexcept>

#include "optpred/integrate.hpp"
#include "optpred/parallel.hpp"

namespace optpred::langevin {

namespace {

void validate(const LangevinConfig& cfg) {
    if (!(cfg.h > 0)) throw std::invalid_argument("langevin: step h must be positive");
    if (!(cfg.t_end > 0)) throw std::invalid_argument("langevin: t_end must be positive");
    if (cfg.noise_q < 0) throw std::invalid_argument("langevin: noise intensity must be >= 0");
    if (cfg.ensemble < 1) throw std::invalid_argument("langevin: ensemble size must be >= 1");
}

std::size_t step_count(const LangevinConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.t_end / cfg.h));
}

struct PathMoments {
    double m2 = 0, m4 = 0;
};

// Second-half time averages of u^2 and u^4 for each realization.
std::vector<PathMoments> path_moments(const LangevinConfig& cfg, std::uint64_t seed, unsigned workers) {
    validate(cfg);
    if (!(cfg.gamma > 0) || cfg.t_end < 10.0 / cfg.gamma)
        throw std::invalid_argument("langevin: stationary statistics need gamma > 0 and t_end >= 10/gamma");
    std::vector<PathMoments> out(cfg.ensemble);
    parallel_for(cfg.ensemble, workers, [&](std::size_t i) {
        auto rng = make_stream(seed, i);
        const auto path = simulate_ou(cfg, 0.0, rng);
        const std::size_t start = path.size() / 2;
        double s2 = 0, s4 = 0;
        for (std::size_t j = start; j < path.size(); ++j) {
            const double u2 = path[j] * path[j];
            s2 += u2;
            s4 += u2 * u2;
        }
        const double cnt = static_cast<double>(path.size() - start);
        out[i] = {s2 / cnt, s4 / cnt};
    });
    return out;
}

}  // namespace

std::vector<double> simulate_ou(const LangevinConfig& cfg, double u0, std::mt19937_64& rng) {
    validate(cfg);
    const std::size_t steps = step_count(cfg);
    const double gamma = cfg.gamma;
    const integrate::Rhs drift = [gamma](double, std::span<const double> y, std::span<double> d) {
        d[0] = -gamma * y[0];
    };
    const double amplitude = std::sqrt(cfg.noise_q);
    std::vector<double> path(steps + 1);
    path[0] = u0;
    integrate::StateVector y{u0};
    for (std::size_t j = 1; j <= steps; ++j) {
        y = integrate::euler_maruyama_step(drift, amplitude, (j - 1) * cfg.h, y, cfg.h, rng);
        path[j] = y[0];
    }
    return path;
}

Estimate stationary_variance_estimate(const LangevinConfig& cfg, std::uint64_t seed, unsigned workers) {
    const auto moments = path_moments(cfg, seed, workers);
    const double n = static_cast<double>(moments.size());
    double mean = 0;
    for (const auto& m : moments) mean += m.m2;
    mean /= n;
    double var = 0;
    for (const auto& m : moments) var += (m.m2 - mean) * (m.m2 - mean);
    Estimate e;
    e.value = mean;
    e.std_error = moments.size() > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    return e;
}

Estimate kurtosis_ratio_estimate(const LangevinConfig& cfg, std::uint64_t seed, unsigned workers) {
    const auto moments = path_moments(cfg, seed, workers);
    const double n = static_cast<double>(moments.size());
    double m2 = 0, m4 = 0;
    for (const auto& m : moments) {
        m2 += m.m2;
        m4 += m.m4;
    }
    m2 /= n;
    m4 /= n;
    Estimate e;
    if (m2 <= 0) return e;
    e.value = m4 / (3.0 * m2 * m2);
    // Delta method on the ratio of means.
    double var = 0;
    for (const auto& m : moments) {
        const double z = (m.m4 - m4) / (3.0 * m2 * m2) - 2.0 * m4 * (m.m2 - m2) / (3.0 * m2 * m2 * m2);
        var += z * z;
    }
    e.std_error = moments.size() > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    return e;
}

VarianceCurve ensemble_variance_curve(const LangevinConfig& cfg, double u0, std::uint64_t seed,
                                      std::size_t stride, unsigned workers) {
    validate(cfg);
    if (stride < 1) throw std::invalid_argument("langevin: stride must be >= 1");
    const std::size_t steps = step_count(cfg);
    std::vector<std::vector<double>> paths(cfg.ensemble);
    parallel_for(cfg.ensemble, workers, [&](std::size_t i) {
        auto rng = make_stream(seed, i);
        paths[i] = simulate_ou(cfg, u0, rng);
    });
    VarianceCurve c;
    const double n = static_cast<double>(cfg.ensemble);
    for (std::size_t j = 0; j <= steps; j += stride) {
        double mean = 0;
        for (const auto& p : paths) mean += p[j];
        mean /= n;
        double m2 = 0, m4 = 0;
        for (const auto& p : paths) {
            const double d2 = (p[j] - mean) * (p[j] - mean);
            m2 += d2;
            m4 += d2 * d2;
        }
        const double var = cfg.ensemble > 1 ? m2 / (n - 1) : 0.0;
        c.times.push_back(j * cfg.h);
        c.variance.push_back(var);
        // SE of a sample variance: sqrt((mu4 - var^2) / n).
        const double mu4 = m4 / n;
        c.std_error.push_back(std::sqrt(std::max(0.0, mu4 - var * var) / n));
    }
    return c;
}

}  // namespace optpred::langevin
