#include "optpred/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace optpred::dynamics {

namespace {

constexpr Complex kI{0.0, 1.0};

double dot(const std::array<double, 2>& a, WaveVector k) { return a[0] * k.k1 + a[1] * k.k2; }
double dot(const std::array<double, 2>& a, const std::array<double, 2>& b) { return a[0] * b[0] + a[1] * b[1]; }

Group classify_pair(const ModePartition& p, WaveVector a, WaveVector b) {
    const bool ra = p.resolved(a), rb = p.resolved(b);
    if (ra && rb) return Group::ResolvedResolved;
    if (ra || rb) return Group::Mixed;
    return Group::SampledSampled;
}

}  // namespace

AveragedEuler::AveragedEuler(ModePartition partition, FlowParams params)
    : partition_(partition), params_(params) {
    partition_.validate();
    params_.validate();
    lattice_ = spectral::Lattice::get(partition_.sampled_bound);
    const auto& modes = lattice_->modes();
    offsets_.reserve(modes.size() + 1);
    offsets_.push_back(0);
    const std::size_t full = lattice_->full_size();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const WaveVector k = modes[i];
        if (partition_.resolved(k)) resolved_.push_back(i);
        if (partition_.sampled(k)) sampled_.push_back(i);
        const auto ek = spectral::transverse_unit(k);
        const double Ak = spectral::a_operator(k, params_);
        for (std::size_t j = 0; j < full; ++j) {
            const WaveVector k1 = lattice_->full_vector(j);
            const WaveVector k2 = k - k1;
            if (!lattice_->contains(k1) || !lattice_->contains(k2)) continue;
            const auto e1 = spectral::transverse_unit(k1);
            const auto e2 = spectral::transverse_unit(k2);
            const double A2 = spectral::a_operator(k2, params_);
            // e_k . [(u' . grad) v'' + (grad u')^T v''] with u' = e1, v'' = A2 e2.
            const double beta = -(A2 / Ak) * (dot(e1, k2) * dot(ek, e2) + dot(ek, k1) * dot(e1, e2));
            if (beta == 0.0) continue;
            terms_.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(lattice_->full_index(k2)),
                              beta, classify_pair(partition_, k1, k2)});
        }
        offsets_.push_back(terms_.size());
    }
}

std::span<const InteractionTerm> AveragedEuler::terms(std::size_t i) const {
    return std::span<const InteractionTerm>(terms_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

void AveragedEuler::expand(std::span<const Complex> amplitudes, std::vector<Complex>& full) const {
    full.assign(lattice_->full_size(), Complex{});
    const auto& modes = lattice_->modes();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        full[lattice_->full_index(modes[i])] = amplitudes[i];
        full[lattice_->full_index(-modes[i])] = -std::conj(amplitudes[i]);
    }
}

void AveragedEuler::rhs(std::span<const Complex> amplitudes, std::span<Complex> out) const {
    std::vector<Complex> full;
    expand(amplitudes, full);
    for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
        Complex acc{};
        for (std::size_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
            const auto& term = terms_[t];
            acc += term.beta * (full[term.first] * full[term.second]);
        }
        out[i] = kI * acc;
    }
}

SpectralField AveragedEuler::full_rhs(const SpectralField& f) const {
    if (f.bound() != lattice_->bound()) throw std::invalid_argument("full_rhs: lattice mismatch");
    SpectralField out(lattice_);
    rhs(f.amplitudes(), out.amplitudes());
    return out;
}

RhsDecomposition AveragedEuler::decompose(const SpectralField& f) const {
    if (f.bound() != lattice_->bound()) throw std::invalid_argument("rhs_decomposition: lattice mismatch");
    std::vector<Complex> full;
    expand(f.amplitudes(), full);
    RhsDecomposition d;
    d.indices = resolved_;
    for (auto i : resolved_) {
        Complex acc[3]{};
        for (std::size_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
            const auto& term = terms_[t];
            acc[static_cast<int>(term.group) - 1] += term.beta * (full[term.first] * full[term.second]);
        }
        d.modes.push_back(lattice_->modes()[i]);
        d.g1.push_back(kI * acc[0]);
        d.g2.push_back(kI * acc[1]);
        d.g3.push_back(kI * acc[2]);
    }
    return d;
}

std::vector<Complex> AveragedEuler::resolved_rhs_g1_g2(const SpectralField& resolved,
                                                       const SpectralField& delta_v) const {
    std::vector<Complex> full;
    expand(resolved.amplitudes(), full);
    const auto& modes = lattice_->modes();
    for (auto i : sampled_) {
        full[lattice_->full_index(modes[i])] = delta_v.amplitude(i);
        full[lattice_->full_index(-modes[i])] = -std::conj(delta_v.amplitude(i));
    }
    std::vector<Complex> out;
    out.reserve(resolved_.size());
    for (auto i : resolved_) {
        Complex acc{};
        for (std::size_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
            const auto& term = terms_[t];
            if (term.group == Group::SampledSampled) continue;
            acc += term.beta * (full[term.first] * full[term.second]);
        }
        out.push_back(kI * acc);
    }
    return out;
}

std::vector<Complex> AveragedEuler::apply_L(const SpectralField& resolved, const SpectralField& delta_v) const {
    if (resolved.bound() != lattice_->bound() || delta_v.bound() != lattice_->bound())
        throw std::invalid_argument("apply_L: lattice mismatch");
    if (!delta_v.is_zero_outside([&](WaveVector k) { return partition_.sampled(k); }))
        throw std::invalid_argument("apply_L: delta_v must be supported on the sampled region");
    std::vector<Complex> full;
    expand(resolved.amplitudes(), full);
    const auto& modes = lattice_->modes();
    for (auto i : sampled_) {
        full[lattice_->full_index(modes[i])] = delta_v.amplitude(i);
        full[lattice_->full_index(-modes[i])] = -std::conj(delta_v.amplitude(i));
    }
    std::vector<Complex> out;
    out.reserve(resolved_.size());
    for (auto i : resolved_) {
        Complex acc{};
        for (std::size_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
            const auto& term = terms_[t];
            if (term.group != Group::Mixed) continue;
            acc += term.beta * (full[term.first] * full[term.second]);
        }
        out.push_back(kI * acc);
    }
    return out;
}

std::vector<double> AveragedEuler::gamma_diagonal(const SpectralField& resolved, const WidthFunction& sigma,
                                                  const GammaOptions& options) const {
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    const double T = params_.T;
    const int m = partition_.m;
    std::vector<double> gamma;
    gamma.reserve(resolved_.size());
    for (auto i : resolved_) {
        const WaveVector k = lattice_->modes()[i];
        const double k2 = k.norm_sq();
        const double Ak = spectral::a_operator(k, params_);
        double sum = 0.0;
        for (int p1 = -m; p1 <= m; ++p1)
            for (int p2 = -m; p2 <= m; ++p2) {
                const WaveVector p{p1, p2};
                if (p.is_zero()) continue;
                const WaveVector q = k - p;
                if (!partition_.sampled(q)) continue;
                const double up2 = std::norm(resolved.signed_amplitude(p));
                if (up2 == 0.0) continue;
                const double qperp_dot_p = static_cast<double>(q.k2) * p.k1 - static_cast<double>(q.k1) * p.k2;
                const double p2n = p.norm_sq(), q2n = q.norm_sq();
                const double Ap = spectral::a_operator(p, params_), Aq = spectral::a_operator(q, params_);
                const double diff = Ap * p2n - Aq * q2n;
                const double s = sigma(options.sigma_source == SigmaSource::ResolvedK ? k.norm() : q.norm());
                if (options.form == GammaForm::AsPrinted) {
                    sum += T * sqrt_pi * s * qperp_dot_p * diff * diff * up2 /
                           (q2n * q2n * Aq * Aq * p2n * k2 * Ak * Ak);
                } else {
                    sum += sqrt_pi * s * qperp_dot_p * qperp_dot_p * diff * diff * up2 /
                           (2.0 * p2n * q2n * q2n * Aq * Aq);
                }
            }
        gamma.push_back(sum);
    }
    return gamma;
}

void AveragedEuler::rhs_packed(std::span<const double> y, std::span<double> dy) const {
    const std::size_t n = lattice_->size();
    std::vector<Complex> amps(n), out(n);
    for (std::size_t i = 0; i < n; ++i) amps[i] = {y[2 * i], y[2 * i + 1]};
    rhs(amps, out);
    for (std::size_t i = 0; i < n; ++i) {
        dy[2 * i] = out[i].real();
        dy[2 * i + 1] = out[i].imag();
    }
}

SpectralField full_rhs(const SpectralField& f, const ModePartition& partition, const FlowParams& params) {
    return AveragedEuler(partition, params).full_rhs(f);
}

RhsDecomposition rhs_decomposition(const SpectralField& f, const ModePartition& partition, const FlowParams& params) {
    return AveragedEuler(partition, params).decompose(f);
}

std::vector<Complex> apply_L(const SpectralField& resolved, const SpectralField& delta_v,
                             const ModePartition& partition, const FlowParams& params) {
    return AveragedEuler(partition, params).apply_L(resolved, delta_v);
}

std::vector<double> gamma_diagonal(const SpectralField& resolved, const WidthFunction& sigma,
                                   const ModePartition& partition, const FlowParams& params,
                                   const GammaOptions& options) {
    return AveragedEuler(partition, params).gamma_diagonal(resolved, sigma, options);
}

double energy(const SpectralField& f, const FlowParams& params) {
    double e = 0.0;
    const auto& modes = f.lattice().modes();
    for (std::size_t i = 0; i < modes.size(); ++i)
        e += spectral::a_operator(modes[i], params) * std::norm(f.amplitude(i));
    return e;
}

double a_enstrophy(const SpectralField& f, const FlowParams& params,
                   const std::function<bool(WaveVector)>& region) {
    double z = 0.0;
    const auto& modes = f.lattice().modes();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (region && !region(modes[i])) continue;
        const double A = spectral::a_operator(modes[i], params);
        z += modes[i].norm_sq() * A * A * std::norm(f.amplitude(i));
    }
    return z;
}

double a_enstrophy(const SpectralField& f, const FlowParams& params) { return a_enstrophy(f, params, {}); }

std::vector<Complex> vorticity(const SpectralField& f) {
    std::vector<Complex> xi;
    xi.reserve(f.size());
    for (const auto& k : f.lattice().modes()) {
        const auto u = f.velocity(k);
        xi.push_back(kI * (static_cast<double>(k.k1) * u[1] - static_cast<double>(k.k2) * u[0]));
    }
    return xi;
}

}  // namespace optpred::dynamics
