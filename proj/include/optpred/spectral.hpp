#pragma once

// Truncated Fourier representation of divergence-free, real velocity fields
// on the periodic square [0, 2pi]^2.
//
// A field is stored on the canonical half-lattice (k1 > 0, or k1 == 0 and
// k2 > 0) as one complex amplitude c_k per mode along the transverse unit
// vector e_k = (k2, -k1) / |k|. The velocity coefficient is u_k = c_k e_k and
// u_{-k} = conj(u_k), so Hermitian symmetry and k . u_k = 0 hold by
// construction.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace optpred::spectral {

using Complex = std::complex<double>;
using Vec2 = std::array<Complex, 2>;

struct WaveVector {
    int k1 = 0, k2 = 0;

    int norm_sq() const { return k1 * k1 + k2 * k2; }
    double norm() const;
    int linf() const;
    bool is_zero() const { return k1 == 0 && k2 == 0; }
    /// k1 > 0, or k1 == 0 and k2 > 0.
    bool is_canonical() const { return k1 > 0 || (k1 == 0 && k2 > 0); }
    WaveVector operator-() const { return {-k1, -k2}; }
    friend WaveVector operator+(WaveVector a, WaveVector b) { return {a.k1 + b.k1, a.k2 + b.k2}; }
    friend WaveVector operator-(WaveVector a, WaveVector b) { return {a.k1 - b.k1, a.k2 - b.k2}; }
    friend auto operator<=>(const WaveVector&, const WaveVector&) = default;
};

/// Unit vector (k2, -k1) / |k|; satisfies e_{-k} = -e_k.
std::array<double, 2> transverse_unit(WaveVector k);

struct FlowParams {
    double a = 1.0;   // smoothing length in A = (1 - a^2 Laplacian)^s
    double T = 1.0;   // temperature of the invariant measure
    int s = 1;

    void validate() const;
};

enum class ModeClass { Zero, Resolved, Sampled, Excluded };

struct ModePartition {
    int m = 2;              // |k|_inf <= m resolved
    int sampled_bound = 4;  // m < |k|_inf <= sampled_bound sampled

    void validate() const;
    ModeClass classify(WaveVector k) const;
    bool resolved(WaveVector k) const { return classify(k) == ModeClass::Resolved; }
    bool sampled(WaveVector k) const { return classify(k) == ModeClass::Sampled; }
};

/// Square lattice |k|_inf <= bound without k = 0. Instances are shared and
/// immutable; obtain them through Lattice::get.
class Lattice {
public:
    static std::shared_ptr<const Lattice> get(int bound);

    int bound() const { return bound_; }
    int side() const { return 2 * bound_ + 1; }
    /// Canonical modes in lexicographic (k1, k2) order.
    const std::vector<WaveVector>& modes() const { return modes_; }
    std::size_t size() const { return modes_.size(); }
    bool contains(WaveVector k) const { return !k.is_zero() && k.linf() <= bound_; }
    /// Dense index over the full square including k = 0 and non-canonical k.
    std::size_t full_index(WaveVector k) const {
        return static_cast<std::size_t>((k.k1 + bound_) * side() + (k.k2 + bound_));
    }
    std::size_t full_size() const { return static_cast<std::size_t>(side() * side()); }
    WaveVector full_vector(std::size_t idx) const {
        return {static_cast<int>(idx) / side() - bound_, static_cast<int>(idx) % side() - bound_};
    }
    std::optional<std::size_t> canonical_index(WaveVector k) const;

    explicit Lattice(int bound);

private:
    int bound_;
    std::vector<WaveVector> modes_;
    std::vector<std::int64_t> canonical_of_full_;
};

class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(std::shared_ptr<const Lattice> lattice);
    static SpectralField zeros(int bound) { return SpectralField(Lattice::get(bound)); }

    /// Builds a field from velocity coefficients keyed by canonical or
    /// non-canonical wavevectors. Rejects k = 0, wavevectors outside the
    /// lattice, non-transverse vectors (relative tolerance 1e-12) and
    /// inconsistent Hermitian pairs.
    static SpectralField from_velocities(int bound, std::span<const std::pair<WaveVector, Vec2>> entries);

    const Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
    int bound() const { return lattice_->bound(); }
    std::size_t size() const { return amp_.size(); }

    /// Transverse amplitude of canonical mode i.
    Complex amplitude(std::size_t i) const { return amp_[i]; }
    void set_amplitude(std::size_t i, Complex c) { amp_[i] = c; }
    std::span<const Complex> amplitudes() const { return amp_; }
    std::span<Complex> amplitudes() { return amp_; }

    /// Velocity coefficient at any k (zero for k = 0 or outside the lattice).
    Vec2 velocity(WaveVector k) const;
    /// Amplitude along e_k at any k, i.e. u_k = c e_k; c_{-k} = -conj(c_k).
    Complex signed_amplitude(WaveVector k) const;

    /// Copy with every mode failing `keep` set to zero.
    SpectralField restricted(const std::function<bool(WaveVector)>& keep) const;
    bool is_zero_outside(const std::function<bool(WaveVector)>& region) const;

    /// (re, im) pairs of the canonical amplitudes selected by `indices`.
    std::vector<double> pack(std::span<const std::size_t> indices) const;
    void unpack(std::span<const std::size_t> indices, std::span<const double> values);

    friend bool operator==(const SpectralField& a, const SpectralField& b) {
        return a.bound() == b.bound() && a.amp_ == b.amp_;
    }

private:
    std::shared_ptr<const Lattice> lattice_;
    std::vector<Complex> amp_;
};

/// Canonical-mode indices of `lattice` whose wavevector satisfies `pred`.
std::vector<std::size_t> mode_indices(const Lattice& lattice, const std::function<bool(WaveVector)>& pred);

/// Fourier symbol of A = (1 - a^2 Laplacian)^s with s = 1.
double a_operator(WaveVector k, const FlowParams& params);

/// P(k) v with P = I - k k^T / |k|^2.
Vec2 leray_projection(WaveVector k, const Vec2& v);

/// T / (|k|^2 A(k)^2): equilibrium E|u_k|^2, also the trace of E[u_k^* u_k^T].
double equilibrium_variance(WaveVector k, const FlowParams& params);

/// Equilibrium covariance E[conj(u_{alpha,k}) u_{beta,k}].
double equilibrium_covariance(WaveVector k, int alpha, int beta, const FlowParams& params);

/// Draws every canonical mode satisfying `region` from the invariant measure,
/// leaving other modes at zero. Draw order is the canonical mode order.
SpectralField sample_equilibrium(int bound, const FlowParams& params,
                                 const std::function<bool(WaveVector)>& region, std::mt19937_64& rng);

/// Resolved modes copied verbatim, sampled modes drawn from the invariant
/// measure, excluded modes zero. `resolved_values` must vanish outside the
/// resolved region.
SpectralField conditional_sample(const SpectralField& resolved_values, const ModePartition& partition,
                                 const FlowParams& params, std::mt19937_64& rng);

/// max_k |k . u_k| / (|k| |u_k|), 0/0 -> 0.
double divergence_residual(std::span<const std::pair<WaveVector, Vec2>> velocities);
double divergence_residual(const SpectralField& f);

/// Snapshot CSV: header `k1,k2,re_u1,im_u1,re_u2,im_u2`, one row per
/// canonical mode in lexicographic order.
void write_snapshot(std::ostream& os, const SpectralField& f);
/// Reads a snapshot; the lattice bound is `bound` or, if negative, the
/// largest |k|_inf present.
SpectralField read_snapshot(std::istream& is, int bound = -1);

}  // namespace optpred::spectral
