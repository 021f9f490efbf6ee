#include "optpred/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optpred::integrate {

namespace {

void check_finite(std::span<const double> v, double t, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            std::ostringstream msg;
            msg << "non-finite " << what << " at t=" << t;
            throw IntegrationError(msg.str());
        }
    }
}

// Evaluates the RK4 update, reusing a precomputed k1 = f(t, y).
void rk4_with_k1(const Rhs& rhs, double t, std::span<const double> y, double h,
                 std::span<const double> k1, std::span<double> out, std::size_t& evals) {
    const std::size_t n = y.size();
    StateVector k2(n), k3(n), k4(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    evals += 3;
    check_finite(k2, t, "right-hand side");
    check_finite(k3, t, "right-hand side");
    check_finite(k4, t, "right-hand side");
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void hermite(double t0, double t1, std::span<const double> y0, std::span<const double> f0,
             std::span<const double> y1, std::span<const double> f1, double t,
             std::span<double> out) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(tol > 0) || !(h_min > 0) || !(h_init > 0) || !(h_max > 0))
        throw std::invalid_argument("integrator: tol and step bounds must be positive");
    if (!(h_min <= h_init && h_init <= h_max))
        throw std::invalid_argument("integrator: require h_min <= h_init <= h_max");
}

StateVector rk4_step(const Rhs& rhs, double t, std::span<const double> y, double h) {
    if (!(h > 0)) throw std::invalid_argument("rk4_step: step size must be positive");
    StateVector k1(y.size()), out(y.size());
    rhs(t, y, k1);
    check_finite(k1, t, "right-hand side");
    std::size_t evals = 1;
    rk4_with_k1(rhs, t, y, h, k1, out, evals);
    return out;
}

Trajectory adaptive_advance(const Rhs& rhs, double t0, std::span<const double> y0,
                            std::span<const double> output_times, const IntegratorConfig& config,
                            const StepHook& before_step) {
    config.validate();
    if (output_times.empty()) throw std::invalid_argument("adaptive_advance: no output times");
    if (!std::is_sorted(output_times.begin(), output_times.end()) || output_times.front() < t0)
        throw std::invalid_argument("adaptive_advance: output times must be sorted and >= t0");
    const double t_end = output_times.back();
    const std::size_t n = y0.size();
    check_finite(y0, t0, "initial state");

    Trajectory traj;
    traj.times.assign(output_times.begin(), output_times.end());
    traj.states.reserve(output_times.size());

    StateVector y(y0.begin(), y0.end());
    StateVector f(n);
    rhs(t0, y, f);
    check_finite(f, t0, "right-hand side");
    traj.rhs_evaluations = 1;

    std::size_t next_out = 0;
    while (next_out < output_times.size() && output_times[next_out] <= t0) {
        traj.states.push_back(y);
        ++next_out;
    }

    double t = t0;
    double h = config.h_init;
    StateVector y_full(n), y_half(n), y_two(n), f_mid(n), f_new(n), y_interp(n);
    bool hook_pending = true;

    while (next_out < output_times.size()) {
        if (hook_pending && before_step) {
            // The hook may change the right-hand side; refresh the cached slope.
            before_step(t, y);
            rhs(t, y, f);
            ++traj.rhs_evaluations;
            check_finite(f, t, "right-hand side");
        }
        hook_pending = false;
        // Never step past the final output time.
        const double h_try = std::min(h, t_end - t);

        rk4_with_k1(rhs, t, y, h_try, f, y_full, traj.rhs_evaluations);
        const double half = 0.5 * h_try;
        rk4_with_k1(rhs, t, y, half, f, y_half, traj.rhs_evaluations);
        rhs(t + half, y_half, f_mid);
        ++traj.rhs_evaluations;
        check_finite(f_mid, t + half, "right-hand side");
        rk4_with_k1(rhs, t + half, y_half, half, f_mid, y_two, traj.rhs_evaluations);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            err = std::max(err, std::abs(y_two[i] - y_full[i]) / 15.0);
        if (!std::isfinite(err)) throw IntegrationError("non-finite error estimate at t=" + std::to_string(t));

        const double allowed = config.tol * h_try;
        if (err > allowed) {
            ++traj.rejected_steps;
            h = 0.5 * h_try;
            if (h < config.h_min) {
                std::ostringstream msg;
                msg << "step size underflow at t=" << t << " (h=" << h << ", h_min=" << config.h_min << ")";
                throw IntegrationError(msg.str());
            }
            continue;
        }

        // Accept the two-half-step solution with Richardson extrapolation.
        for (std::size_t i = 0; i < n; ++i) y_two[i] += (y_two[i] - y_full[i]) / 15.0;
        check_finite(y_two, t + h_try, "state");
        const double t_new = (t_end - (t + h_try) <= 1e-14 * std::max(1.0, std::abs(t_end))) ? t_end : t + h_try;
        rhs(t_new, y_two, f_new);
        ++traj.rhs_evaluations;
        check_finite(f_new, t_new, "right-hand side");

        while (next_out < output_times.size() && output_times[next_out] <= t_new) {
            const double to = output_times[next_out];
            if (to == t_new) {
                traj.states.push_back(y_two);
            } else {
                hermite(t, t_new, y, f, y_two, f_new, to, y_interp);
                traj.states.push_back(y_interp);
            }
            ++next_out;
        }

        traj.accepted_step_times.push_back(t);
        ++traj.accepted_steps;
        t = t_new;
        y.swap(y_two);
        f.swap(f_new);
        hook_pending = true;

        // err ~ C h^5, tolerance ~ tol*h, so the ratio scales as h^4.
        double factor = 2.0;
        if (err > 0.0) factor = std::min(2.0, std::max(0.5, 0.9 * std::pow(allowed / err, 0.25)));
        h = std::clamp(h_try * factor, config.h_min, config.h_max);
    }
    return traj;
}

StateVector euler_maruyama_step(const Rhs& drift, double noise_amplitude, double t,
                                std::span<const double> y, double h,
                                std::span<const double> gaussian_draws) {
    if (!(h > 0)) throw std::invalid_argument("euler_maruyama_step: step size must be positive");
    if (gaussian_draws.size() != y.size())
        throw std::invalid_argument("euler_maruyama_step: one draw per component required");
    StateVector d(y.size());
    drift(t, y, d);
    check_finite(d, t, "drift");
    const double scale = noise_amplitude * std::sqrt(h);
    StateVector out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * d[i] + scale * gaussian_draws[i];
    return out;
}

StateVector euler_maruyama_step(const Rhs& drift, double noise_amplitude, double t,
                                std::span<const double> y, double h, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVector xi(y.size());
    for (auto& x : xi) x = normal(rng);
    return euler_maruyama_step(drift, noise_amplitude, t, y, h, xi);
}

}  // namespace optpred::integrate
