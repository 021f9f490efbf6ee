#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "optpred/dynamics.hpp"
#include "optpred/integrate.hpp"
#include "optpred/spectral.hpp"

namespace optpred::ensemble {

using spectral::Complex;
using spectral::FlowParams;
using spectral::ModePartition;
using spectral::SpectralField;
using spectral::WaveVector;

struct EnsembleConfig {
    std::size_t ensemble = 200;
    std::vector<double> output_times{0.0};
    std::uint64_t master_seed = 1;
    ModePartition partition;
    FlowParams params;
    /// Prescribed resolved data; must vanish outside |k|_inf <= m. An empty
    /// field means all-zero resolved data.
    SpectralField initial_resolved;
    integrate::IntegratorConfig integrator{1e-7, 1e-2, 1e-12, 0.25};
    /// Uniform grid for sampled-mode histories; history_end <= 0 disables them.
    double history_dt = 0.05;
    double history_end = 0.0;
    unsigned workers = 1;
    /// Test hook: skip the sampled-mode draw (sampled modes start at zero).
    bool zero_sampled = false;

    void validate() const;
};

/// Sampled-mode amplitudes of every realization on a uniform time grid.
struct Histories {
    std::vector<WaveVector> modes;
    std::vector<std::size_t> indices;  // canonical indices
    std::vector<double> times;
    std::size_t realizations = 0;
    std::vector<Complex> data;  // [realization][mode][time]

    Complex at(std::size_t r, std::size_t mode, std::size_t t) const {
        return data[(r * modes.size() + mode) * times.size() + t];
    }
    Complex& at(std::size_t r, std::size_t mode, std::size_t t) {
        return data[(r * modes.size() + mode) * times.size() + t];
    }
};

/// Scalar diagnostic with a Monte Carlo standard error.
struct Measured {
    double value = 0;
    double std_error = 0;
};

/// Per-output-time ensemble means and A-enstrophy diagnostics. A-enstrophies
/// are taken over the resolved modes only, so full and reduced runs are
/// directly comparable.
struct EnsembleStats {
    std::vector<double> times;
    std::vector<SpectralField> mean;
    /// Standard error of each canonical mean amplitude, sqrt(E|x - mean|^2 / N).
    std::vector<std::vector<double>> mean_std_error;
    std::vector<Measured> a_enstrophy_of_mean;  // mean first, then the norm
    std::vector<Measured> mean_a_enstrophy;     // norm per realization, then the mean
    std::size_t ensemble = 0;
};

struct EnsembleResult {
    EnsembleStats stats;
    Histories histories;
};

class RealizationError : public std::runtime_error {
public:
    RealizationError(std::size_t index, const std::string& what)
        : std::runtime_error("realization " + std::to_string(index) + ": " + what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

/// Reduces per-realization snapshots (all canonical modes) to EnsembleStats,
/// in realization-index order.
EnsembleStats reduce_snapshots(const std::vector<std::vector<SpectralField>>& runs, std::span<const double> times,
                               const ModePartition& partition, const FlowParams& params);

/// Monte Carlo over the full truncated system. Realization i starts from
/// conditional_sample(initial_resolved) with stream make_stream(seed, i).
EnsembleResult run_ensemble(const EnsembleConfig& cfg);

struct CorrelationTable {
    std::vector<WaveVector> modes;
    double lag_dt = 0.05;
    std::size_t ensemble = 0;
    /// [mode][lag]
    std::vector<std::vector<Complex>> value;
    std::vector<std::vector<double>> std_error;
    /// Lag-0 estimate over the first and second half of the time origins.
    std::vector<Complex> c0_first_half, c0_second_half;

    std::size_t lags() const { return value.empty() ? 0 : value.front().size(); }
    double tau(std::size_t j) const { return static_cast<double>(j) * lag_dt; }
    std::optional<std::size_t> find(WaveVector k) const;
};

/// Autocovariance of each history mode, averaged over realizations and
/// time origins, with the ensemble mean at each time subtracted.
CorrelationTable estimate_correlations(const Histories& h, std::size_t max_lag_steps);

/// Same estimator between two different modes.
struct ComplexMeasured {
    Complex value;
    double std_error = 0;  // sqrt(E|estimate - truth|^2)
};
ComplexMeasured cross_correlation(const Histories& h, std::size_t mode_a, std::size_t mode_b, std::size_t lag_steps);

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Least squares of ln(C(tau)/C(0)) against -tau^2/sigma^2 over the leading
/// lags with Re C > threshold * C(0). Throws FitError with fewer than three
/// usable positive lags.
double fit_gaussian_width(std::span<const double> tau, std::span<const double> c, double threshold = 0.1);
double fit_gaussian_width(const CorrelationTable& table, std::size_t mode, double threshold = 0.1);

/// sigma(k) = c / |k|.
struct WidthModel {
    double c = 0;
    double residual = 0;  // coefficient of variation of sigma(k) |k|
    std::vector<std::pair<WaveVector, double>> widths;

    double sigma(double k_norm) const { return c / k_norm; }
    dynamics::WidthFunction function() const {
        const double cc = c;
        return [cc](double kn) { return cc / kn; };
    }
};

WidthModel fit_width_model(std::span<const std::pair<WaveVector, double>> widths);

/// Fits every mode of the table that admits a fit; modes without one are
/// reported in `failed`.
struct WidthFits {
    std::vector<std::pair<WaveVector, double>> widths;
    std::vector<WaveVector> failed;
};
WidthFits fit_all_widths(const CorrelationTable& table, double threshold = 0.1);

/// Comparison of two A-enstrophy decay curves on a common time grid. The
/// window ends at the first time the reference curve has lost
/// `decay_fraction` of its initial value (or at the last time if it never
/// does).
struct DecayComparison {
    double t_star = 0;
    bool reference_decayed = false;
    double max_deviation = 0;  // max |candidate / reference - 1| over t <= t_star
    double worst_time = 0;
    double reference_decay = 0, candidate_decay = 0;              // 1 - Z(t_star) / Z(0)
    double reference_final_decay = 0, candidate_final_decay = 0;  // 1 - Z(t_last) / Z(0)
    /// No value in [monotone_after, t_star] exceeds an earlier one in that
    /// range by more than twice their combined standard error.
    bool reference_monotone = true, candidate_monotone = true;

    bool passed(double tolerance) const {
        return max_deviation < tolerance && reference_monotone && candidate_monotone;
    }
};

DecayComparison compare_decay(std::span<const double> times, std::span<const Measured> reference,
                              std::span<const Measured> candidate, double decay_fraction = 0.2,
                              double monotone_after = 0.5);

}  // namespace optpred::ensemble
