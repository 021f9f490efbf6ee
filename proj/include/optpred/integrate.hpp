#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace optpred::integrate {

/// Flattened degrees of freedom. Complex coefficients are stored as
/// consecutive (re, im) pairs.
using StateVector = std::vector<double>;

/// dy/dt = f(t, y), written into `dydt` (same length as `y`).
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Invoked once before every macro step attempt sequence that starts at (t, y).
/// Rejected attempts retry from the same point without a second call.
using StepHook = std::function<void(double t, std::span<const double> y)>;

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
    double tol = 1e-8;     // local error tolerance per unit time
    double h_init = 1e-2;
    double h_min = 1e-12;
    double h_max = 0.5;

    void validate() const;
};

/// Classical four-stage Runge-Kutta step.
StateVector rk4_step(const Rhs& rhs, double t, std::span<const double> y, double h);

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    std::vector<double> accepted_step_times;  // start time of every accepted step
};

/// Adaptive RK4 with step-doubling error control. The trajectory is sampled at
/// `output_times` (non-decreasing, all >= t0) by cubic Hermite interpolation
/// over accepted steps, so the set of requested outputs never influences the
/// step sequence. Integration ends at output_times.back().
Trajectory adaptive_advance(const Rhs& rhs, double t0, std::span<const double> y0,
                            std::span<const double> output_times, const IntegratorConfig& config,
                            const StepHook& before_step = {});

/// y + h*drift(y) + amplitude*sqrt(h)*xi with xi ~ N(0,1) per component.
StateVector euler_maruyama_step(const Rhs& drift, double noise_amplitude, double t,
                                std::span<const double> y, double h, std::mt19937_64& rng);

/// Same update with caller-supplied standard normal draws (one per component).
StateVector euler_maruyama_step(const Rhs& drift, double noise_amplitude, double t,
                                std::span<const double> y, double h,
                                std::span<const double> gaussian_draws);

}  // namespace optpred::integrate
