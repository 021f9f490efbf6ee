#pragma once

// Truncated Fourier-Galerkin form of the 2D averaged Euler equations
//
//   d(A u)/dt + (u . grad) A u + (grad u)^T . A u = -grad p,   div u = 0,
//
// on the lattice |k|_inf <= sampled_bound. Each canonical amplitude evolves as
//
//   dc_k/dt = sum_{k' + k'' = k} i beta(k, k', k'') c_{k'} c_{k''},
//
// where c_j is the signed transverse amplitude (u_j = c_j e_j) and beta holds
// the projected advection and stretching terms divided by A(k).

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "optpred/spectral.hpp"

namespace optpred::dynamics {

using spectral::Complex;
using spectral::FlowParams;
using spectral::ModePartition;
using spectral::SpectralField;
using spectral::WaveVector;

enum class Group : std::uint8_t { ResolvedResolved = 1, Mixed = 2, SampledSampled = 3 };

/// One quadratic interaction feeding canonical target k from the ordered
/// pair (k', k - k'). Indices refer to Lattice::full_index.
struct InteractionTerm {
    std::uint32_t first;
    std::uint32_t second;
    double beta;
    Group group;
};

/// G1, G2, G3 parts of dc_k/dt on the resolved canonical modes.
struct RhsDecomposition {
    std::vector<WaveVector> modes;
    std::vector<std::size_t> indices;  // canonical indices of `modes`
    std::vector<Complex> g1, g2, g3;
};

/// Which resolved wavevector's width enters the damping sum.
enum class SigmaSource { ResolvedK, SampledQ };

/// Closed form of the damping coefficient.
///  AsPrinted: T sqrt(pi) sigma (q_perp . p) (A_p p^2 - A_q q^2)^2 |u_p|^2 / (q^4 A_q^2 p^2 k^2 A_k^2)
///  Balanced:  sqrt(pi) sigma (q_perp . p)^2 (A_p p^2 - A_q q^2)^2 |u_p|^2 / (2 p^2 q^4 A_q^2),
///             the rate at which the noise term injects variance into mode k
///             divided by twice its equilibrium variance.
enum class GammaForm { AsPrinted, Balanced };

struct GammaOptions {
    GammaForm form = GammaForm::AsPrinted;
    SigmaSource sigma_source = SigmaSource::ResolvedK;
};

/// Width of a mode's Gaussian autocorrelation as a function of |k|.
using WidthFunction = std::function<double(double k_norm)>;

class AveragedEuler {
public:
    AveragedEuler(ModePartition partition, FlowParams params);

    const ModePartition& partition() const { return partition_; }
    const FlowParams& params() const { return params_; }
    const spectral::Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const spectral::Lattice> lattice_ptr() const { return lattice_; }
    const std::vector<std::size_t>& resolved_indices() const { return resolved_; }
    const std::vector<std::size_t>& sampled_indices() const { return sampled_; }
    /// Interaction coefficients of canonical mode i, in lexicographic k' order.
    std::span<const InteractionTerm> terms(std::size_t i) const;

    /// dc/dt on every canonical mode.
    void rhs(std::span<const Complex> amplitudes, std::span<Complex> out) const;
    SpectralField full_rhs(const SpectralField& f) const;
    RhsDecomposition decompose(const SpectralField& f) const;

    /// Mixed-term sum on resolved modes with the resolved factor from
    /// `resolved` and the sampled factor from `delta_v`. Result is indexed like
    /// resolved_indices().
    std::vector<Complex> apply_L(const SpectralField& resolved, const SpectralField& delta_v) const;

    /// G1 + G2 on resolved modes of the field made of the resolved part of
    /// `resolved` and the sampled part of `delta_v` (G3 omitted).
    std::vector<Complex> resolved_rhs_g1_g2(const SpectralField& resolved, const SpectralField& delta_v) const;

    /// Diagonal damping coefficient for every resolved canonical mode.
    std::vector<double> gamma_diagonal(const SpectralField& resolved, const WidthFunction& sigma,
                                       const GammaOptions& options = {}) const;

    /// Real-vector adapter over all canonical modes for the integrators.
    void rhs_packed(std::span<const double> y, std::span<double> dy) const;

private:
    void expand(std::span<const Complex> amplitudes, std::vector<Complex>& full) const;

    ModePartition partition_;
    FlowParams params_;
    std::shared_ptr<const spectral::Lattice> lattice_;
    std::vector<InteractionTerm> terms_;
    std::vector<std::size_t> offsets_;  // terms of mode i: [offsets_[i], offsets_[i+1])
    std::vector<std::size_t> resolved_, sampled_;
};

// Convenience wrappers that build the interaction table on each call.
SpectralField full_rhs(const SpectralField& f, const ModePartition& partition, const FlowParams& params);
RhsDecomposition rhs_decomposition(const SpectralField& f, const ModePartition& partition, const FlowParams& params);
std::vector<Complex> apply_L(const SpectralField& resolved, const SpectralField& delta_v,
                             const ModePartition& partition, const FlowParams& params);
std::vector<double> gamma_diagonal(const SpectralField& resolved, const WidthFunction& sigma,
                                   const ModePartition& partition, const FlowParams& params,
                                   const GammaOptions& options = {});

/// Sum over canonical modes of A(k) |u_k|^2; each {k, -k} pair counted once.
double energy(const SpectralField& f, const FlowParams& params);
/// Sum over canonical modes of |k|^2 A(k)^2 |u_k|^2.
double a_enstrophy(const SpectralField& f, const FlowParams& params);
double a_enstrophy(const SpectralField& f, const FlowParams& params, const std::function<bool(WaveVector)>& region);

/// xi_k = i (k1 u_{2,k} - k2 u_{1,k}) for every canonical mode.
std::vector<Complex> vorticity(const SpectralField& f);

}  // namespace optpred::dynamics
