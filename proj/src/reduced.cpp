#include "optpred/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optpred/parallel.hpp"

namespace optpred::reduced {

NoiseProcess::NoiseProcess(std::shared_ptr<const spectral::Lattice> lattice, std::vector<std::size_t> indices,
                           double grid_dt, std::size_t grid_points)
    : lattice_(std::move(lattice)),
      indices_(std::move(indices)),
      dt_(grid_dt),
      n_(grid_points),
      values_(indices_.size() * grid_points, Complex{}) {}

Complex NoiseProcess::at(std::size_t mode, double t) const {
    if (t < 0 || t > t_end() * (1 + 1e-12))
        throw std::out_of_range("noise path evaluated outside its grid");
    const double x = t / dt_;
    const auto j = std::min(static_cast<std::size_t>(x), n_ - 2);
    const double w = x - static_cast<double>(j);
    return (1.0 - w) * value(mode, j) + w * value(mode, j + 1);
}

SpectralField NoiseProcess::field_at(double t) const {
    SpectralField f(lattice_);
    for (std::size_t m = 0; m < indices_.size(); ++m) f.set_amplitude(indices_[m], at(m, t));
    return f;
}

namespace {

// Symmetric square root of the unit-variance Gaussian-kernel covariance on an
// n-point grid. Eigenvalues below zero (round-off) are clipped.
Eigen::MatrixXd covariance_root(std::size_t n, double dt, double sigma) {
    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double tau = (static_cast<double>(i) - static_cast<double>(j)) * dt;
            K(i, j) = std::exp(-tau * tau / (sigma * sigma));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    if (eig.info() != Eigen::Success) {
        K.diagonal().array() += 1e-12;
        eig.compute(K);
        if (eig.info() != Eigen::Success) throw std::runtime_error("noise covariance factorization failed");
    }
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

NoiseGenerator::NoiseGenerator(const ModePartition& partition, const FlowParams& params,
                               const ensemble::WidthModel& width, double t_end, double grid_dt) {
    partition.validate();
    params.validate();
    if (!(t_end > 0)) throw std::invalid_argument("noise: t_end must be positive");
    lattice_ = spectral::Lattice::get(partition.sampled_bound);
    indices_ = spectral::mode_indices(*lattice_, [&](WaveVector k) { return partition.sampled(k); });

    double sigma_min = std::numeric_limits<double>::infinity();
    std::size_t zero_widths = 0;
    for (auto i : indices_) {
        const double s = width.sigma(lattice_->modes()[i].norm());
        if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("noise: widths must be finite and >= 0");
        if (s == 0) ++zero_widths;
        else sigma_min = std::min(sigma_min, s);
    }
    if (!indices_.empty() && zero_widths == indices_.size()) {
        degenerate_ = true;
        dt_ = t_end;
        n_ = 2;
        return;
    }
    if (zero_widths > 0) throw std::invalid_argument("noise: widths must be all zero or all positive");
    if (indices_.empty()) {
        dt_ = t_end;
        n_ = 2;
        return;
    }

    const double limit = sigma_min / 8.0;
    dt_ = grid_dt > 0 ? grid_dt : limit;
    if (dt_ > limit * (1 + 1e-12)) throw std::invalid_argument("noise: grid spacing must be <= min sigma / 8");
    n_ = static_cast<std::size_t>(std::ceil(t_end / dt_ - 1e-9)) + 1;

    std::map<int, int> factor_by_norm;
    for (auto i : indices_) {
        const WaveVector k = lattice_->modes()[i];
        variance_.push_back(spectral::equilibrium_variance(k, params));
        auto [it, inserted] = factor_by_norm.try_emplace(k.norm_sq(), static_cast<int>(factors_.size()));
        if (inserted) factors_.push_back(covariance_root(n_, dt_, width.sigma(k.norm())));
        factor_of_mode_.push_back(it->second);
    }
}

NoiseProcess NoiseGenerator::generate(std::mt19937_64& rng) const {
    NoiseProcess p(lattice_, indices_, dt_, n_);
    if (degenerate_) return p;
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd zr(n_), zi(n_);
    for (std::size_t m = 0; m < indices_.size(); ++m) {
        for (std::size_t j = 0; j < n_; ++j) zr(j) = normal(rng);
        for (std::size_t j = 0; j < n_; ++j) zi(j) = normal(rng);
        const auto& S = factors_[factor_of_mode_[m]];
        const double scale = std::sqrt(0.5 * variance_[m]);
        const Eigen::VectorXd re = S * zr;
        const Eigen::VectorXd im = S * zi;
        for (std::size_t j = 0; j < n_; ++j) p.value(m, j) = {scale * re(j), scale * im(j)};
    }
    return p;
}

NoiseProcess generate_noise(const ModePartition& partition, const FlowParams& params,
                            const ensemble::WidthModel& width, double t_end, double grid_dt, std::mt19937_64& rng) {
    return NoiseGenerator(partition, params, width, t_end, grid_dt).generate(rng);
}

std::vector<Complex> sop_rhs_with_gamma(const SpectralField& resolved, const SpectralField& delta_v,
                                        std::span<const double> gamma, const dynamics::AveragedEuler& engine) {
    auto d = engine.resolved_rhs_g1_g2(resolved, delta_v);
    const auto& idx = engine.resolved_indices();
    for (std::size_t j = 0; j < idx.size(); ++j) d[j] -= gamma[j] * resolved.amplitude(idx[j]);
    return d;
}

std::vector<Complex> sop_rhs(const ReducedState& state, const NoiseProcess& noise,
                             const dynamics::AveragedEuler& engine, const ensemble::WidthModel& width,
                             const ReducedOptions& options) {
    const auto& p = engine.partition();
    if (!state.resolved.is_zero_outside([&](WaveVector k) { return p.resolved(k); }))
        throw std::invalid_argument("sop_rhs: state has amplitude outside the resolved region");
    const SpectralField dv = options.noise ? noise.field_at(state.time) : SpectralField(engine.lattice_ptr());
    std::vector<double> gamma(engine.resolved_indices().size(), 0.0);
    if (options.damping) gamma = engine.gamma_diagonal(state.resolved, width.function(), options.gamma);
    return sop_rhs_with_gamma(state.resolved, dv, gamma, engine);
}

RealizationTrace integrate_realization(const SpectralField& initial, const NoiseProcess& noise,
                                       const dynamics::AveragedEuler& engine, const ensemble::WidthModel& width,
                                       std::span<const double> times, const integrate::IntegratorConfig& config,
                                       const ReducedOptions& options, bool record_gamma) {
    const auto& idx = engine.resolved_indices();
    const auto lattice = engine.lattice_ptr();
    const auto sigma = width.function();
    std::vector<double> gamma(idx.size(), 0.0);
    RealizationTrace trace;

    const integrate::StepHook hook = [&](double t, std::span<const double> y) {
        if (!options.damping) return;
        SpectralField u(lattice);
        u.unpack(idx, y);
        gamma = engine.gamma_diagonal(u, sigma, options.gamma);
        if (record_gamma) trace.gamma_log.push_back({t, std::vector<double>(y.begin(), y.end()), gamma});
    };
    const integrate::Rhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        SpectralField u(lattice);
        u.unpack(idx, y);
        const SpectralField dv = options.noise ? noise.field_at(t) : SpectralField(lattice);
        const auto d = sop_rhs_with_gamma(u, dv, gamma, engine);
        for (std::size_t j = 0; j < d.size(); ++j) {
            dy[2 * j] = d[j].real();
            dy[2 * j + 1] = d[j].imag();
        }
    };

    const auto y0 = initial.pack(idx);
    const auto traj = integrate::adaptive_advance(rhs, 0.0, y0, times, config, hook);
    trace.accepted_steps = traj.accepted_steps;
    for (const auto& y : traj.states) {
        SpectralField u(lattice);
        u.unpack(idx, y);
        trace.snapshots.push_back(std::move(u));
    }
    return trace;
}

ensemble::EnsembleStats run_reduced_ensemble(const ensemble::EnsembleConfig& cfg, const ensemble::WidthModel& width,
                                             const ReducedOptions& options) {
    cfg.validate();
    const dynamics::AveragedEuler engine(cfg.partition, cfg.params);
    const SpectralField initial = cfg.initial_resolved.size() ? cfg.initial_resolved : SpectralField(engine.lattice_ptr());
    const double t_end = cfg.output_times.back();
    std::optional<NoiseGenerator> generator;
    if (options.noise && t_end > 0)
        generator.emplace(cfg.partition, cfg.params, width, t_end, options.noise_grid_dt);

    std::vector<std::vector<SpectralField>> runs(cfg.ensemble);
    parallel_for(cfg.ensemble, cfg.workers, [&](std::size_t r) {
        auto rng = make_stream(cfg.master_seed, r);
        const NoiseProcess noise = generator ? generator->generate(rng) : NoiseProcess{};
        ReducedOptions opts = options;
        opts.noise = options.noise && generator.has_value();
        try {
            runs[r] = integrate_realization(initial, noise, engine, width, cfg.output_times, cfg.integrator, opts).snapshots;
        } catch (const integrate::IntegrationError& e) {
            throw ensemble::RealizationError(r, e.what());
        }
    });
    return ensemble::reduce_snapshots(runs, cfg.output_times, cfg.partition, cfg.params);
}

}  // namespace optpred::reduced
