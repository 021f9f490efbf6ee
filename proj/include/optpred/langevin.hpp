#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace optpred::langevin {

/// du/dt = -gamma u + n(t), with white noise of intensity noise_q
/// (E[n(t) n(s)] = noise_q * delta(t - s)).
struct LangevinConfig {
    double gamma = 1.0;
    double noise_q = 2.0;
    double h = 1e-3;
    double t_end = 20.0;
    std::size_t ensemble = 1000;

    double stationary_variance() const { return noise_q / (2.0 * gamma); }
};

/// Euler-Maruyama path sampled at every step, u[0] = u0.
std::vector<double> simulate_ou(const LangevinConfig& cfg, double u0, std::mt19937_64& rng);

struct Estimate {
    double value = 0;
    double std_error = 0;
};

/// Ensemble-and-time average of u^2 over the second half of each path,
/// started at u0 = 0. Requires t_end >= 10 / gamma.
Estimate stationary_variance_estimate(const LangevinConfig& cfg, std::uint64_t seed, unsigned workers = 1);

/// Ratio E[u^4] / (3 E[u^2]^2) over the same samples; 1 for a Gaussian.
Estimate kurtosis_ratio_estimate(const LangevinConfig& cfg, std::uint64_t seed, unsigned workers = 1);

struct VarianceCurve {
    std::vector<double> times;
    std::vector<double> variance;
    std::vector<double> std_error;
};

/// Ensemble variance of u(t) about its ensemble mean, every `stride` steps.
VarianceCurve ensemble_variance_curve(const LangevinConfig& cfg, double u0, std::uint64_t seed,
                                      std::size_t stride, unsigned workers = 1);

}  // namespace optpred::langevin
