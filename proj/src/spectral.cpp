#include "optpred/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>

#include "optpred/csv.hpp"

namespace optpred::spectral {

double WaveVector::norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

int WaveVector::linf() const { return std::max(std::abs(k1), std::abs(k2)); }

std::array<double, 2> transverse_unit(WaveVector k) {
    const double n = k.norm();
    return {k.k2 / n, -k.k1 / n};
}

void FlowParams::validate() const {
    if (s != 1) throw std::invalid_argument("only s = 1 is supported");
    if (!std::isfinite(a) || a < 0) throw std::invalid_argument("a must be finite and >= 0");
    if (!std::isfinite(T) || !(T > 0)) throw std::invalid_argument("temperature must be finite and > 0");
}

void ModePartition::validate() const {
    if (m < 0) throw std::invalid_argument("resolved cutoff m must be >= 0");
    if (sampled_bound < 1) throw std::invalid_argument("sampled bound must be >= 1");
    if (sampled_bound < 2 * m) throw std::invalid_argument("sampled bound must be >= 2m");
}

ModeClass ModePartition::classify(WaveVector k) const {
    if (k.is_zero()) return ModeClass::Zero;
    const int n = k.linf();
    if (n <= m) return ModeClass::Resolved;
    if (n <= sampled_bound) return ModeClass::Sampled;
    return ModeClass::Excluded;
}

Lattice::Lattice(int bound) : bound_(bound) {
    if (bound < 1) throw std::invalid_argument("lattice bound must be >= 1");
    canonical_of_full_.assign(full_size(), -1);
    for (int k1 = 0; k1 <= bound; ++k1)
        for (int k2 = -bound; k2 <= bound; ++k2) {
            const WaveVector k{k1, k2};
            if (!k.is_canonical()) continue;
            canonical_of_full_[full_index(k)] = static_cast<std::int64_t>(modes_.size());
            modes_.push_back(k);
        }
}

std::shared_ptr<const Lattice> Lattice::get(int bound) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const Lattice>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[bound];
    if (!slot) slot = std::make_shared<const Lattice>(bound);
    return slot;
}

std::optional<std::size_t> Lattice::canonical_index(WaveVector k) const {
    if (!contains(k)) return std::nullopt;
    const auto c = canonical_of_full_[full_index(k)];
    if (c < 0) return std::nullopt;
    return static_cast<std::size_t>(c);
}

SpectralField::SpectralField(std::shared_ptr<const Lattice> lattice)
    : lattice_(std::move(lattice)), amp_(lattice_->size(), Complex{}) {}

Complex SpectralField::signed_amplitude(WaveVector k) const {
    if (!lattice_->contains(k)) return {};
    if (k.is_canonical()) return amp_[*lattice_->canonical_index(k)];
    return -std::conj(amp_[*lattice_->canonical_index(-k)]);
}

Vec2 SpectralField::velocity(WaveVector k) const {
    if (!lattice_->contains(k)) return {};
    const auto e = transverse_unit(k);
    const Complex c = signed_amplitude(k);
    return {c * e[0], c * e[1]};
}

SpectralField SpectralField::from_velocities(int bound, std::span<const std::pair<WaveVector, Vec2>> entries) {
    SpectralField f(Lattice::get(bound));
    std::vector<bool> seen(f.size(), false);
    for (const auto& [k, u] : entries) {
        if (k.is_zero()) throw std::invalid_argument("the k = 0 mode must vanish");
        if (!f.lattice().contains(k)) throw std::invalid_argument("wavevector outside the lattice");
        const double un = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
        const Complex div = static_cast<double>(k.k1) * u[0] + static_cast<double>(k.k2) * u[1];
        if (std::abs(div) > 1e-12 * k.norm() * un) throw std::invalid_argument("velocity is not divergence-free");
        const auto e = transverse_unit(k);
        // Amplitude along e_k; for non-canonical k convert through u_k = conj(u_{-k}).
        const Complex c_k = e[0] * u[0] + e[1] * u[1];
        const bool canon = k.is_canonical();
        const std::size_t idx = *f.lattice().canonical_index(canon ? k : -k);
        const Complex c = canon ? c_k : -std::conj(c_k);
        if (seen[idx]) {
            if (std::abs(f.amp_[idx] - c) > 1e-12 * std::max(1.0, std::abs(c)))
                throw std::invalid_argument("velocity violates Hermitian symmetry");
        }
        f.amp_[idx] = c;
        seen[idx] = true;
    }
    return f;
}

SpectralField SpectralField::restricted(const std::function<bool(WaveVector)>& keep) const {
    SpectralField out(*this);
    const auto& modes = lattice_->modes();
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (!keep(modes[i])) out.amp_[i] = {};
    return out;
}

bool SpectralField::is_zero_outside(const std::function<bool(WaveVector)>& region) const {
    const auto& modes = lattice_->modes();
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (!region(modes[i]) && amp_[i] != Complex{}) return false;
    return true;
}

std::vector<double> SpectralField::pack(std::span<const std::size_t> indices) const {
    std::vector<double> y;
    y.reserve(2 * indices.size());
    for (auto i : indices) {
        y.push_back(amp_[i].real());
        y.push_back(amp_[i].imag());
    }
    return y;
}

void SpectralField::unpack(std::span<const std::size_t> indices, std::span<const double> values) {
    for (std::size_t j = 0; j < indices.size(); ++j) amp_[indices[j]] = {values[2 * j], values[2 * j + 1]};
}

std::vector<std::size_t> mode_indices(const Lattice& lattice, const std::function<bool(WaveVector)>& pred) {
    std::vector<std::size_t> out;
    const auto& modes = lattice.modes();
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (pred(modes[i])) out.push_back(i);
    return out;
}

double a_operator(WaveVector k, const FlowParams& params) {
    return 1.0 + params.a * params.a * static_cast<double>(k.norm_sq());
}

Vec2 leray_projection(WaveVector k, const Vec2& v) {
    if (k.is_zero()) throw std::domain_error("leray_projection: k = 0");
    const double k2 = static_cast<double>(k.norm_sq());
    const double kk[2] = {static_cast<double>(k.k1), static_cast<double>(k.k2)};
    const Complex kv = kk[0] * v[0] + kk[1] * v[1];
    return {v[0] - kk[0] * kv / k2, v[1] - kk[1] * kv / k2};
}

double equilibrium_variance(WaveVector k, const FlowParams& params) {
    const double A = a_operator(k, params);
    return params.T / (static_cast<double>(k.norm_sq()) * A * A);
}

double equilibrium_covariance(WaveVector k, int alpha, int beta, const FlowParams& params) {
    const double kk[2] = {static_cast<double>(k.k1), static_cast<double>(k.k2)};
    const double proj = (alpha == beta ? 1.0 : 0.0) - kk[alpha] * kk[beta] / k.norm_sq();
    return equilibrium_variance(k, params) * proj;
}

SpectralField sample_equilibrium(int bound, const FlowParams& params,
                                 const std::function<bool(WaveVector)>& region, std::mt19937_64& rng) {
    params.validate();
    SpectralField f = SpectralField::zeros(bound);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto& modes = f.lattice().modes();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!region(modes[i])) continue;
        const double sd = std::sqrt(0.5 * equilibrium_variance(modes[i], params));
        const double re = normal(rng);
        const double im = normal(rng);
        f.set_amplitude(i, {sd * re, sd * im});
    }
    return f;
}

SpectralField conditional_sample(const SpectralField& resolved_values, const ModePartition& partition,
                                 const FlowParams& params, std::mt19937_64& rng) {
    partition.validate();
    if (resolved_values.bound() != partition.sampled_bound)
        throw std::invalid_argument("conditional_sample: field lattice does not match the partition");
    if (!resolved_values.is_zero_outside([&](WaveVector k) { return partition.resolved(k); }))
        throw std::invalid_argument("conditional_sample: resolved values must vanish outside |k|_inf <= m");
    SpectralField f = sample_equilibrium(partition.sampled_bound, params,
                                         [&](WaveVector k) { return partition.sampled(k); }, rng);
    const auto& modes = f.lattice().modes();
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (partition.resolved(modes[i])) f.set_amplitude(i, resolved_values.amplitude(i));
    return f;
}

double divergence_residual(std::span<const std::pair<WaveVector, Vec2>> velocities) {
    double worst = 0.0;
    for (const auto& [k, u] : velocities) {
        const double un = std::sqrt(std::norm(u[0]) + std::norm(u[1]));
        if (un == 0.0 || k.is_zero()) continue;
        const Complex div = static_cast<double>(k.k1) * u[0] + static_cast<double>(k.k2) * u[1];
        worst = std::max(worst, std::abs(div) / (k.norm() * un));
    }
    return worst;
}

double divergence_residual(const SpectralField& f) {
    std::vector<std::pair<WaveVector, Vec2>> v;
    for (const auto& k : f.lattice().modes()) v.emplace_back(k, f.velocity(k));
    return divergence_residual(v);
}

void write_snapshot(std::ostream& os, const SpectralField& f) {
    os << "k1,k2,re_u1,im_u1,re_u2,im_u2\n";
    for (const auto& k : f.lattice().modes()) {
        const auto u = f.velocity(k);
        csv::write_row(os, {std::to_string(k.k1), std::to_string(k.k2), csv::format_real(u[0].real()),
                            csv::format_real(u[0].imag()), csv::format_real(u[1].real()),
                            csv::format_real(u[1].imag())});
    }
}

SpectralField read_snapshot(std::istream& is, int bound) {
    const auto table = csv::read_table(is);
    const std::size_t c_k1 = table.column("k1"), c_k2 = table.column("k2");
    const std::size_t c_r1 = table.column("re_u1"), c_i1 = table.column("im_u1");
    const std::size_t c_r2 = table.column("re_u2"), c_i2 = table.column("im_u2");
    std::vector<std::pair<WaveVector, Vec2>> entries;
    int max_linf = 0;
    for (const auto& row : table.rows) {
        const WaveVector k{static_cast<int>(csv::parse_int(row[c_k1])), static_cast<int>(csv::parse_int(row[c_k2]))};
        const Vec2 u{Complex{csv::parse_real(row[c_r1]), csv::parse_real(row[c_i1])},
                     Complex{csv::parse_real(row[c_r2]), csv::parse_real(row[c_i2])}};
        max_linf = std::max(max_linf, k.linf());
        entries.emplace_back(k, u);
    }
    if (bound < 0) bound = std::max(1, max_linf);
    return SpectralField::from_velocities(bound, entries);
}

}  // namespace optpred::spectral
