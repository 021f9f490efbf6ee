#pragma once

// Stochastic reduced model for the resolved modes:
//
//   du_k/dt = G1_k(u) - gamma_k u_k + [L(u) dv(t)]_k,
//
// where dv is a prescribed Gaussian process on the sampled modes with
// autocovariance V(k) exp(-(t1 - t2)^2 / sigma(k)^2), V(k) = T / (k^2 A(k)^2),
// and gamma_k is the diagonal damping coefficient refreshed once per accepted
// integrator step. The noise is smooth, so the system is integrated as a random
// ODE.

#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "optpred/dynamics.hpp"
#include "optpred/ensemble.hpp"

namespace optpred::reduced {

using spectral::Complex;
using spectral::FlowParams;
using spectral::ModePartition;
using spectral::SpectralField;
using spectral::WaveVector;

/// One Gaussian path per canonical sampled mode on a uniform grid, linearly
/// interpolated in between. Transversality and Hermitian symmetry follow from
/// the SpectralField representation.
class NoiseProcess {
public:
    NoiseProcess() = default;
    NoiseProcess(std::shared_ptr<const spectral::Lattice> lattice, std::vector<std::size_t> indices, double grid_dt,
                 std::size_t grid_points);

    const std::vector<std::size_t>& indices() const { return indices_; }
    double grid_dt() const { return dt_; }
    std::size_t grid_points() const { return n_; }
    double t_end() const { return dt_ * static_cast<double>(n_ - 1); }

    Complex& value(std::size_t mode, std::size_t j) { return values_[mode * n_ + j]; }
    Complex value(std::size_t mode, std::size_t j) const { return values_[mode * n_ + j]; }
    Complex at(std::size_t mode, double t) const;
    /// Field supported on the sampled modes at time t.
    SpectralField field_at(double t) const;

private:
    std::shared_ptr<const spectral::Lattice> lattice_;
    std::vector<std::size_t> indices_;
    double dt_ = 0;
    std::size_t n_ = 0;
    std::vector<Complex> values_;
};

/// Holds the symmetric square roots of the grid covariance matrices, one per
/// distinct |k|, so repeated draws cost one matrix-vector product per mode.
class NoiseGenerator {
public:
    /// grid_dt <= 0 selects min_k sigma(k) / 8.
    NoiseGenerator(const ModePartition& partition, const FlowParams& params, const ensemble::WidthModel& width,
                   double t_end, double grid_dt = 0.0);

    NoiseProcess generate(std::mt19937_64& rng) const;
    double grid_dt() const { return dt_; }
    /// True when every width is zero: the process is identically zero.
    bool degenerate() const { return degenerate_; }

private:
    std::shared_ptr<const spectral::Lattice> lattice_;
    std::vector<std::size_t> indices_;
    std::vector<double> variance_;    // V(k) per sampled mode
    std::vector<int> factor_of_mode_;  // index into factors_
    std::vector<Eigen::MatrixXd> factors_;
    double dt_ = 0;
    std::size_t n_ = 0;
    bool degenerate_ = false;
};

NoiseProcess generate_noise(const ModePartition& partition, const FlowParams& params,
                            const ensemble::WidthModel& width, double t_end, double grid_dt, std::mt19937_64& rng);

struct ReducedOptions {
    bool noise = true;
    bool damping = true;
    dynamics::GammaOptions gamma{dynamics::GammaForm::Balanced, dynamics::SigmaSource::SampledQ};
    double noise_grid_dt = 0.0;  // <= 0: min sigma / 8
};

struct ReducedState {
    SpectralField resolved;
    double time = 0;
};

/// G1(u) - gamma(u) u + L(u) dv(t) on resolved canonical modes, with gamma
/// evaluated at `state`. Indexed like AveragedEuler::resolved_indices().
std::vector<Complex> sop_rhs(const ReducedState& state, const NoiseProcess& noise,
                             const dynamics::AveragedEuler& engine, const ensemble::WidthModel& width,
                             const ReducedOptions& options = {});

/// Same right-hand side with a caller-supplied damping vector.
std::vector<Complex> sop_rhs_with_gamma(const SpectralField& resolved, const SpectralField& delta_v,
                                        std::span<const double> gamma, const dynamics::AveragedEuler& engine);

/// Damping in force for one accepted step, with the packed resolved state it
/// was evaluated at.
struct GammaRecord {
    double t = 0;
    std::vector<double> state;
    std::vector<double> gamma;
};

struct RealizationTrace {
    std::vector<SpectralField> snapshots;
    std::vector<GammaRecord> gamma_log;
    std::size_t accepted_steps = 0;
};

/// Integrates one realization of the reduced model from `initial` with the
/// given noise path, sampled at `times`.
RealizationTrace integrate_realization(const SpectralField& initial, const NoiseProcess& noise,
                                       const dynamics::AveragedEuler& engine, const ensemble::WidthModel& width,
                                       std::span<const double> times, const integrate::IntegratorConfig& config,
                                       const ReducedOptions& options, bool record_gamma = false);

/// Ensemble of reduced-model realizations; realization i uses make_stream(seed, i)
/// for its noise path.
ensemble::EnsembleStats run_reduced_ensemble(const ensemble::EnsembleConfig& cfg, const ensemble::WidthModel& width,
                                             const ReducedOptions& options = {});

}  // namespace optpred::reduced
