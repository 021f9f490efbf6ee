#include "optpred/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "optpred/parallel.hpp"

namespace optpred::ensemble {

void EnsembleConfig::validate() const {
    partition.validate();
    params.validate();
    integrator.validate();
    if (ensemble < 1) throw std::invalid_argument("ensemble size must be >= 1");
    if (output_times.empty() || output_times.front() != 0.0)
        throw std::invalid_argument("output times must be non-empty and start at 0");
    if (!std::is_sorted(output_times.begin(), output_times.end()))
        throw std::invalid_argument("output times must be increasing");
    if (history_end > 0 && !(history_dt > 0)) throw std::invalid_argument("history_dt must be positive");
    if (initial_resolved.size() != 0) {
        if (initial_resolved.bound() != partition.sampled_bound)
            throw std::invalid_argument("initial resolved field lattice does not match sampled_bound");
        if (!initial_resolved.is_zero_outside([&](WaveVector k) { return partition.resolved(k); }))
            throw std::invalid_argument("initial resolved field has amplitude outside |k|_inf <= m");
    }
}

std::optional<std::size_t> CorrelationTable::find(WaveVector k) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i] == k) return i;
    return std::nullopt;
}

EnsembleStats reduce_snapshots(const std::vector<std::vector<SpectralField>>& runs, std::span<const double> times,
                               const ModePartition& partition, const FlowParams& params) {
    EnsembleStats s;
    s.times.assign(times.begin(), times.end());
    s.ensemble = runs.size();
    if (runs.empty()) return s;
    const double n = static_cast<double>(runs.size());
    const auto lattice = runs.front().front().lattice_ptr();
    const auto& modes = lattice->modes();
    std::vector<double> weight(modes.size(), 0.0);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!partition.resolved(modes[i])) continue;
        const double A = spectral::a_operator(modes[i], params);
        weight[i] = modes[i].norm_sq() * A * A;
    }

    for (std::size_t j = 0; j < times.size(); ++j) {
        SpectralField mean(lattice);
        for (const auto& run : runs)
            for (std::size_t i = 0; i < modes.size(); ++i)
                mean.amplitudes()[i] += run[j].amplitude(i);
        for (auto& c : mean.amplitudes()) c /= n;

        std::vector<double> se(modes.size(), 0.0);
        std::vector<double> influence(runs.size(), 0.0), per_run(runs.size(), 0.0);
        for (std::size_t r = 0; r < runs.size(); ++r) {
            for (std::size_t i = 0; i < modes.size(); ++i) {
                const Complex x = runs[r][j].amplitude(i);
                const Complex d = x - mean.amplitude(i);
                se[i] += std::norm(d);
                // Linearization of sum_k w_k |mean_k|^2 around the sample mean.
                influence[r] += 2.0 * weight[i] * (std::conj(mean.amplitude(i)) * d).real();
                per_run[r] += weight[i] * std::norm(x);
            }
        }
        for (auto& v : se) v = runs.size() > 1 ? std::sqrt(v / (n - 1) / n) : 0.0;

        double aom = 0.0;
        for (std::size_t i = 0; i < modes.size(); ++i) aom += weight[i] * std::norm(mean.amplitude(i));
        double var_infl = 0.0, mean_z = 0.0, var_z = 0.0;
        for (double z : influence) var_infl += z * z;
        for (double z : per_run) mean_z += z;
        mean_z /= n;
        for (double z : per_run) var_z += (z - mean_z) * (z - mean_z);
        const double denom = runs.size() > 1 ? (n - 1) * n : 1.0;
        s.a_enstrophy_of_mean.push_back({aom, runs.size() > 1 ? std::sqrt(var_infl / denom) : 0.0});
        s.mean_a_enstrophy.push_back({mean_z, runs.size() > 1 ? std::sqrt(var_z / denom) : 0.0});
        s.mean.push_back(std::move(mean));
        s.mean_std_error.push_back(std::move(se));
    }
    return s;
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    const dynamics::AveragedEuler engine(cfg.partition, cfg.params);
    const auto lattice = engine.lattice_ptr();
    const SpectralField initial = cfg.initial_resolved.size() ? cfg.initial_resolved : SpectralField(lattice);

    std::vector<double> hist_times;
    if (cfg.history_end > 0) {
        const auto steps = static_cast<std::size_t>(std::llround(cfg.history_end / cfg.history_dt));
        for (std::size_t j = 0; j <= steps; ++j) hist_times.push_back(j * cfg.history_dt);
    }
    std::vector<double> all_times(cfg.output_times);
    all_times.insert(all_times.end(), hist_times.begin(), hist_times.end());
    std::sort(all_times.begin(), all_times.end());
    all_times.erase(std::unique(all_times.begin(), all_times.end()), all_times.end());
    auto position = [&](double t) {
        return static_cast<std::size_t>(std::lower_bound(all_times.begin(), all_times.end(), t) - all_times.begin());
    };

    std::vector<std::size_t> all_modes(lattice->size());
    for (std::size_t i = 0; i < all_modes.size(); ++i) all_modes[i] = i;

    EnsembleResult result;
    auto& hist = result.histories;
    hist.indices = engine.sampled_indices();
    for (auto i : hist.indices) hist.modes.push_back(lattice->modes()[i]);
    hist.times = hist_times;
    hist.realizations = cfg.ensemble;
    hist.data.assign(cfg.ensemble * hist.modes.size() * hist_times.size(), Complex{});

    const integrate::Rhs rhs = [&engine](double, std::span<const double> y, std::span<double> dy) {
        engine.rhs_packed(y, dy);
    };

    std::vector<std::vector<SpectralField>> snapshots(cfg.ensemble);
    parallel_for(cfg.ensemble, cfg.workers, [&](std::size_t r) {
        auto rng = make_stream(cfg.master_seed, r);
        const SpectralField f0 = cfg.zero_sampled ? initial : spectral::conditional_sample(initial, cfg.partition, cfg.params, rng);
        const auto y0 = f0.pack(all_modes);
        integrate::Trajectory traj;
        try {
            traj = integrate::adaptive_advance(rhs, 0.0, y0, all_times, cfg.integrator);
        } catch (const integrate::IntegrationError& e) {
            throw RealizationError(r, e.what());
        }
        auto& snaps = snapshots[r];
        snaps.reserve(cfg.output_times.size());
        for (double t : cfg.output_times) {
            SpectralField f(lattice);
            f.unpack(all_modes, traj.states[position(t)]);
            snaps.push_back(std::move(f));
        }
        for (std::size_t j = 0; j < hist_times.size(); ++j) {
            const auto& y = traj.states[position(hist_times[j])];
            for (std::size_t m = 0; m < hist.indices.size(); ++m) {
                const std::size_t i = hist.indices[m];
                hist.at(r, m, j) = {y[2 * i], y[2 * i + 1]};
            }
        }
    });

    result.stats = reduce_snapshots(snapshots, cfg.output_times, cfg.partition, cfg.params);
    return result;
}

namespace {

// Ensemble mean of each mode at each time.
std::vector<Complex> history_means(const Histories& h) {
    const std::size_t nm = h.modes.size(), nt = h.times.size();
    std::vector<Complex> mean(nm * nt, Complex{});
    for (std::size_t r = 0; r < h.realizations; ++r)
        for (std::size_t m = 0; m < nm; ++m)
            for (std::size_t t = 0; t < nt; ++t) mean[m * nt + t] += h.at(r, m, t);
    for (auto& v : mean) v /= static_cast<double>(h.realizations);
    return mean;
}

// Per-realization origin average of conj(a(t) - mean_a(t)) (b(t + lag) - mean_b(t + lag))
// over origins in [begin, end).
Complex origin_average(const Histories& h, const std::vector<Complex>& mean, std::size_t r, std::size_t a,
                       std::size_t b, std::size_t lag, std::size_t begin, std::size_t end) {
    const std::size_t nt = h.times.size();
    Complex acc{};
    for (std::size_t t = begin; t < end; ++t) {
        const Complex x = h.at(r, a, t) - mean[a * nt + t];
        const Complex y = h.at(r, b, t + lag) - mean[b * nt + t + lag];
        acc += std::conj(x) * y;
    }
    return acc / static_cast<double>(end - begin);
}

}  // namespace

CorrelationTable estimate_correlations(const Histories& h, std::size_t max_lag_steps) {
    if (h.realizations < 2) throw std::invalid_argument("correlations need at least two realizations");
    if (h.times.size() < 2) throw std::invalid_argument("correlations need a history grid");
    if (max_lag_steps >= h.times.size()) throw std::invalid_argument("lag exceeds the history span");
    const std::size_t nt = h.times.size();
    const auto mean = history_means(h);
    const double n = static_cast<double>(h.realizations);
    const double bias = n / (n - 1.0);

    CorrelationTable table;
    table.modes = h.modes;
    table.lag_dt = h.times[1] - h.times[0];
    table.ensemble = h.realizations;
    table.value.assign(h.modes.size(), std::vector<Complex>(max_lag_steps + 1));
    table.std_error.assign(h.modes.size(), std::vector<double>(max_lag_steps + 1));
    table.c0_first_half.assign(h.modes.size(), Complex{});
    table.c0_second_half.assign(h.modes.size(), Complex{});

    std::vector<Complex> per_run(h.realizations);
    for (std::size_t m = 0; m < h.modes.size(); ++m) {
        for (std::size_t lag = 0; lag <= max_lag_steps; ++lag) {
            Complex sum{};
            for (std::size_t r = 0; r < h.realizations; ++r) {
                per_run[r] = origin_average(h, mean, r, m, m, lag, 0, nt - lag) * bias;
                sum += per_run[r];
            }
            const Complex c = sum / n;
            double var = 0.0;
            for (const auto& v : per_run) var += std::norm(v - c);
            table.value[m][lag] = c;
            table.std_error[m][lag] = std::sqrt(var / (n - 1) / n);
        }
        Complex first{}, second{};
        for (std::size_t r = 0; r < h.realizations; ++r) {
            first += origin_average(h, mean, r, m, m, 0, 0, nt / 2) * bias;
            second += origin_average(h, mean, r, m, m, 0, nt / 2, nt) * bias;
        }
        table.c0_first_half[m] = first / n;
        table.c0_second_half[m] = second / n;
    }
    return table;
}

ComplexMeasured cross_correlation(const Histories& h, std::size_t mode_a, std::size_t mode_b, std::size_t lag_steps) {
    if (h.realizations < 2) throw std::invalid_argument("correlations need at least two realizations");
    if (lag_steps >= h.times.size()) throw std::invalid_argument("lag exceeds the history span");
    const auto mean = history_means(h);
    const double n = static_cast<double>(h.realizations);
    std::vector<Complex> per_run(h.realizations);
    Complex sum{};
    for (std::size_t r = 0; r < h.realizations; ++r) {
        per_run[r] = origin_average(h, mean, r, mode_a, mode_b, lag_steps, 0, h.times.size() - lag_steps) * (n / (n - 1));
        sum += per_run[r];
    }
    ComplexMeasured out;
    out.value = sum / n;
    double var = 0.0;
    for (const auto& v : per_run) var += std::norm(v - out.value);
    out.std_error = std::sqrt(var / (n - 1) / n);
    return out;
}

double fit_gaussian_width(std::span<const double> tau, std::span<const double> c, double threshold) {
    if (tau.size() != c.size() || tau.empty()) throw FitError("width fit: mismatched or empty input");
    const double c0 = c[0];
    if (!(c0 > 0)) throw FitError("width fit: C(0) must be positive");
    double sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (std::size_t j = 1; j < tau.size(); ++j) {
        if (!(c[j] > threshold * c0)) break;
        const double x = -tau[j] * tau[j];
        const double y = std::log(c[j] / c0);
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    if (used < 3) throw FitError("width fit: fewer than 3 usable lags");
    const double inv_sigma_sq = sxy / sxx;
    if (!(inv_sigma_sq > 0)) throw FitError("width fit: correlation does not decay");
    return 1.0 / std::sqrt(inv_sigma_sq);
}

double fit_gaussian_width(const CorrelationTable& table, std::size_t mode, double threshold) {
    std::vector<double> tau, c;
    for (std::size_t j = 0; j < table.lags(); ++j) {
        tau.push_back(table.tau(j));
        c.push_back(table.value[mode][j].real());
    }
    return fit_gaussian_width(tau, c, threshold);
}

WidthModel fit_width_model(std::span<const std::pair<WaveVector, double>> widths) {
    if (widths.size() < 3) throw FitError("width model: need at least 3 fitted modes");
    WidthModel model;
    model.widths.assign(widths.begin(), widths.end());
    double sum = 0.0;
    for (const auto& [k, s] : widths) sum += s * k.norm();
    const double n = static_cast<double>(widths.size());
    model.c = sum / n;
    double var = 0.0;
    for (const auto& [k, s] : widths) {
        const double d = s * k.norm() - model.c;
        var += d * d;
    }
    model.residual = model.c != 0.0 ? std::sqrt(var / n) / model.c : 0.0;
    return model;
}

WidthFits fit_all_widths(const CorrelationTable& table, double threshold) {
    WidthFits fits;
    for (std::size_t m = 0; m < table.modes.size(); ++m) {
        try {
            fits.widths.emplace_back(table.modes[m], fit_gaussian_width(table, m, threshold));
        } catch (const FitError&) {
            fits.failed.push_back(table.modes[m]);
        }
    }
    return fits;
}

namespace {

bool monotone_within_errors(std::span<const double> times, std::span<const Measured> z, double after, double t_star) {
    for (std::size_t j = 0; j < times.size() && times[j] <= t_star; ++j) {
        if (times[j] < after) continue;
        for (std::size_t i = 0; i < j; ++i) {
            if (times[i] < after) continue;
            const double se = std::hypot(z[i].std_error, z[j].std_error);
            if (z[j].value - z[i].value > 2.0 * se) return false;
        }
    }
    return true;
}

}  // namespace

DecayComparison compare_decay(std::span<const double> times, std::span<const Measured> reference,
                              std::span<const Measured> candidate, double decay_fraction, double monotone_after) {
    if (times.empty() || reference.size() != times.size() || candidate.size() != times.size())
        throw std::invalid_argument("compare_decay: curves must share a non-empty time grid");
    if (!(reference[0].value > 0) || !(candidate[0].value > 0))
        throw std::invalid_argument("compare_decay: initial values must be positive");
    DecayComparison out;
    const double z0 = reference[0].value;
    std::size_t end = times.size() - 1;
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (reference[j].value <= (1.0 - decay_fraction) * z0) {
            end = j;
            out.reference_decayed = true;
            break;
        }
    }
    out.t_star = times[end];
    for (std::size_t j = 0; j <= end; ++j) {
        const double d = std::abs(candidate[j].value / reference[j].value - 1.0);
        if (d > out.max_deviation) {
            out.max_deviation = d;
            out.worst_time = times[j];
        }
    }
    out.reference_decay = 1.0 - reference[end].value / z0;
    out.candidate_decay = 1.0 - candidate[end].value / candidate[0].value;
    out.reference_final_decay = 1.0 - reference.back().value / z0;
    out.candidate_final_decay = 1.0 - candidate.back().value / candidate[0].value;
    out.reference_monotone = monotone_within_errors(times, reference, monotone_after, out.t_star);
    out.candidate_monotone = monotone_within_errors(times, candidate, monotone_after, out.t_star);
    return out;
}

}  // namespace optpred::ensemble
