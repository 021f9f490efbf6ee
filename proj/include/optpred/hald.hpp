#pragma once

// Two coupled oscillators with H = (q1^2 + q2^2 + p1^2 + p2^2 + p1^2 p2^2) / 2.
// Only (q1, p1) are observed; (q2, p2) are drawn from the canonical measure
// conditioned on them.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "optpred/integrate.hpp"

namespace optpred::hald {

struct HaldState {
    double q1 = 0, q2 = 0, p1 = 0, p2 = 0;
};

struct HaldReducedState {
    double q1 = 0, p1 = 0;
};

/// Time derivative of the full state, same field layout as HaldState.
using HaldDerivative = HaldState;
using ReducedDerivative = HaldReducedState;

class Temperature {
public:
    explicit Temperature(double value) : value_(value) {
        if (!(value > 0)) throw std::invalid_argument("temperature must be positive");
    }
    double value() const { return value_; }

private:
    double value_;
};

double hamiltonian(const HaldState& s);
HaldDerivative full_rhs(const HaldState& s);
ReducedDerivative galerkin_rhs(const HaldReducedState& r);

/// First-order optimal prediction: dq1/dt = p1 + p1 * E[p2^2 | p1] with
/// E[p2^2 | p1] = T / (1 + p1^2).
ReducedDerivative op_rhs(const HaldReducedState& r, Temperature T);

/// Effective Hamiltonian of the OP system, zero at the origin.
double renormalized_hamiltonian(const HaldReducedState& r, Temperature T);

/// Keeps (q1, p1) and draws q2 ~ N(0, T), p2 ~ N(0, T / (1 + p1^2)).
HaldState sample_conditional(const HaldReducedState& r, Temperature T, std::mt19937_64& rng);

// Flattening used by the integrators: (q1, p1, q2, p2) and (q1, p1).
integrate::StateVector to_vector(const HaldState& s);
HaldState from_vector(std::span<const double> y);
integrate::Rhs full_system();
integrate::Rhs galerkin_system();
integrate::Rhs op_system(Temperature T);

struct ReducedTrajectory {
    std::vector<double> times;
    std::vector<HaldReducedState> states;
};

std::vector<HaldState> full_trajectory(const HaldState& s0, std::span<const double> times,
                                       const integrate::IntegratorConfig& config);
ReducedTrajectory galerkin_trajectory(const HaldReducedState& r0, std::span<const double> times,
                                      const integrate::IntegratorConfig& config);
ReducedTrajectory op_trajectory(const HaldReducedState& r0, Temperature T, std::span<const double> times,
                                const integrate::IntegratorConfig& config);

struct MeanTrajectory {
    std::vector<double> times;
    std::vector<double> mean_q1, mean_p1;
    std::vector<double> stderr_q1, stderr_p1;
    std::size_t ensemble_size = 0;

    double amplitude(std::size_t i) const;
};

class RealizationError : public std::runtime_error {
public:
    RealizationError(std::size_t index, const std::string& what)
        : std::runtime_error("realization " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Average of `n` full-system trajectories started from r0 with hidden
/// coordinates from sample_conditional. Realization i draws from
/// make_stream(seed, i); means are reduced in index order.
MeanTrajectory ensemble_mean_trajectory(const HaldReducedState& r0, Temperature T, std::size_t n,
                                        std::span<const double> times, std::uint64_t seed,
                                        const integrate::IntegratorConfig& config, unsigned workers = 1);

}  // namespace optpred::hald
