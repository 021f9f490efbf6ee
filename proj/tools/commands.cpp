#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "optpred/csv.hpp"
#include "optpred/ensemble.hpp"
#include "optpred/hald.hpp"
#include "optpred/langevin.hpp"
#include "optpred/parallel.hpp"
#include "optpred/reduced.hpp"

namespace optpred::cli {

using csv::format_real;
using spectral::FlowParams;
using spectral::ModePartition;
using spectral::SpectralField;
using spectral::WaveVector;

void RunContext::write_file(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const auto path = out_dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("error writing " + path.string());
    if (std::find(outputs.begin(), outputs.end(), name) == outputs.end()) outputs.push_back(name);
}

namespace {

std::vector<double> time_grid(double t_end, double dt) {
    if (!(t_end > 0)) throw UsageError("t_end must be positive");
    if (!(dt > 0)) throw UsageError("dt_out must be positive");
    const auto n = std::llround(t_end / dt);
    if (n < 1 || std::abs(static_cast<double>(n) * dt - t_end) > 1e-9 * t_end)
        throw UsageError("t_end must be a whole multiple of dt_out");
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = static_cast<double>(j) * dt;
    t.back() = t_end;
    return t;
}

std::size_t positive_count(const Config& c, const std::string& key) {
    const auto n = c.count(key);
    if (n < 1) throw UsageError(key + " must be >= 1");
    return n;
}

unsigned workers(const Config& c) { return static_cast<unsigned>(std::max<std::size_t>(1, c.count("workers"))); }

std::uint64_t seed(const Config& c, const std::string& key = "seed") {
    return static_cast<std::uint64_t>(c.count(key));
}

// ---------------------------------------------------------------- hald

int cmd_hald(const Config& c, RunContext& ctx) {
    const hald::HaldReducedState r0{c.real("q1"), c.real("p1")};
    const hald::Temperature T(c.real("T"));
    const std::size_t n = positive_count(c, "ensemble");
    const auto times = time_grid(c.real("t_end"), c.real("dt_out"));
    integrate::IntegratorConfig ic{c.real("tol"), 1e-2, 1e-12, 0.5};
    ic.validate();

    const auto mean = hald::ensemble_mean_trajectory(r0, T, n, times, seed(c), ic, workers(c));
    const auto op = hald::op_trajectory(r0, T, times, ic);
    const auto gal = hald::galerkin_trajectory(r0, times, ic);

    ctx.write_file("hald_mean.csv", [&](std::ostream& os) {
        csv::write_row(os, {"t", "mean_q1", "mean_p1", "stderr_q1", "stderr_p1", "amplitude"});
        for (std::size_t j = 0; j < times.size(); ++j)
            csv::write_reals(os, {times[j], mean.mean_q1[j], mean.mean_p1[j], mean.stderr_q1[j], mean.stderr_p1[j],
                                  mean.amplitude(j)});
    });
    ctx.write_file("hald_op.csv", [&](std::ostream& os) {
        csv::write_row(os, {"t", "q1", "p1", "H_renorm"});
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto& s = op.states[j];
            csv::write_reals(os, {times[j], s.q1, s.p1, hald::renormalized_hamiltonian(s, T)});
        }
    });
    ctx.write_file("hald_galerkin.csv", [&](std::ostream& os) {
        csv::write_row(os, {"t", "q1", "p1", "H"});
        for (std::size_t j = 0; j < times.size(); ++j) {
            const auto& s = gal.states[j];
            csv::write_reals(os, {times[j], s.q1, s.p1, 0.5 * (s.q1 * s.q1 + s.p1 * s.p1)});
        }
    });
    ctx.out << "hald: mean amplitude " << format_real(mean.amplitude(0)) << " at t=0, "
            << format_real(mean.amplitude(times.size() - 1)) << " at t=" << format_real(times.back()) << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------- langevin

int cmd_langevin(const Config& c, RunContext& ctx) {
    langevin::LangevinConfig lc;
    lc.gamma = c.real("gamma");
    lc.noise_q = c.real("noise_q");
    lc.h = c.real("step");
    lc.t_end = c.real("t_end");
    lc.ensemble = positive_count(c, "ensemble");
    if (!(lc.gamma > 0)) throw UsageError("gamma must be positive");
    if (!(lc.noise_q >= 0)) throw UsageError("noise_q must be >= 0");
    if (!(lc.h > 0) || !(lc.t_end > lc.h)) throw UsageError("need 0 < step < t_end");
    const std::size_t stride = positive_count(c, "stride");

    const auto curve = langevin::ensemble_variance_curve(lc, c.real("u0"), seed(c), stride, workers(c));
    const auto var = langevin::stationary_variance_estimate(lc, seed(c), workers(c));
    const double expected = lc.stationary_variance();

    ctx.write_file("langevin_variance.csv", [&](std::ostream& os) {
        csv::write_row(os, {"t", "variance", "stderr"});
        for (std::size_t j = 0; j < curve.times.size(); ++j)
            csv::write_reals(os, {curve.times[j], curve.variance[j], curve.std_error[j]});
    });
    ctx.write_file("langevin_summary.csv", [&](std::ostream& os) {
        csv::write_row(os, {"quantity", "value", "stderr", "expected"});
        csv::write_row(os, {"stationary_variance", format_real(var.value), format_real(var.std_error),
                            format_real(expected)});
        if (lc.noise_q > 0) {
            const auto kr = langevin::kurtosis_ratio_estimate(lc, seed(c), workers(c));
            csv::write_row(os, {"kurtosis_ratio", format_real(kr.value), format_real(kr.std_error), "1"});
        }
    });
    ctx.out << "langevin: stationary variance " << format_real(var.value) << " +/- "
            << format_real(4.0 * var.std_error) << " (4 SE), expected " << format_real(expected) << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------- Euler setup

struct Preset {
    int m, sampled_bound;
};

const std::map<std::string, Preset>& presets() {
    static const std::map<std::string, Preset> p{{"desk", {2, 4}}, {"paper", {5, 10}}};
    return p;
}

std::vector<ParamSpec> euler_params(const std::string& t_end, const std::string& ensemble) {
    return {
        {"preset", "desk", Kind::Text, "desk (m=2, sampled_bound=4) or paper (m=5, sampled_bound=10)"},
        {"m", "", Kind::Integer, "resolved modes |k|_inf <= m (default from preset)"},
        {"sampled_bound", "", Kind::Integer, "sampled modes m < |k|_inf <= sampled_bound (default from preset)"},
        {"a", "1", Kind::Real, "smoothing length in A = 1 - a^2 Laplacian"},
        {"T", "1", Kind::Real, "temperature"},
        {"ensemble", ensemble, Kind::Integer, "number of realizations"},
        {"t_end", t_end, Kind::Real, "final time"},
        {"dt_out", "0.05", Kind::Real, "output spacing"},
        {"seed", "1", Kind::Integer, "master seed"},
        {"initial", "equilibrium", Kind::Text, "resolved initial data: equilibrium, zero, or a snapshot CSV path"},
        {"init_seed", "12345", Kind::Integer, "seed of the equilibrium draw used when initial=equilibrium"},
        {"tol", "1e-7", Kind::Real, "integrator tolerance per unit time"},
        {"h_max", "0.25", Kind::Real, "largest integrator step"},
        {"workers", "1", Kind::Integer, "worker threads (never changes results)"},
    };
}

void resolve_preset(Config& c, const std::set<std::string>& user) {
    const auto it = presets().find(c.text("preset"));
    if (it == presets().end()) throw UsageError("unknown preset '" + c.text("preset") + "'");
    if (!user.count("m")) c.set("m", std::to_string(it->second.m));
    if (!user.count("sampled_bound")) c.set("sampled_bound", std::to_string(it->second.sampled_bound));
    if (c.has("max_lag") && !user.count("max_lag")) c.set("max_lag", format_real(std::min(5.0, c.real("t_end") / 2)));
}

struct EulerSetup {
    ensemble::EnsembleConfig ens;
    SpectralField initial;
};

EulerSetup euler_setup(const Config& c, bool equilibrium) {
    EulerSetup s;
    auto& e = s.ens;
    e.partition = ModePartition{static_cast<int>(c.integer("m")), static_cast<int>(c.integer("sampled_bound"))};
    if (equilibrium) e.partition.m = 0;
    e.partition.validate();
    e.params = FlowParams{c.real("a"), c.real("T"), 1};
    e.params.validate();
    e.ensemble = positive_count(c, "ensemble");
    e.output_times = time_grid(c.real("t_end"), c.real("dt_out"));
    e.master_seed = seed(c);
    e.integrator = integrate::IntegratorConfig{c.real("tol"), std::min(1e-2, c.real("h_max")), 1e-12, c.real("h_max")};
    e.workers = workers(c);

    const auto& p = e.partition;
    const auto resolved = [&p](WaveVector k) { return p.resolved(k); };
    const std::string& init = c.text("initial");
    if (init == "equilibrium") {
        auto rng = make_stream(seed(c, "init_seed"), 0);
        s.initial = spectral::sample_equilibrium(p.sampled_bound, e.params, resolved, rng);
    } else if (init == "zero") {
        s.initial = SpectralField::zeros(p.sampled_bound);
    } else {
        std::ifstream in(init);
        if (!in) throw UsageError("cannot open initial field " + init);
        s.initial = spectral::read_snapshot(in, p.sampled_bound);
    }
    e.initial_resolved = s.initial;
    e.validate();
    return s;
}

void write_aenstrophy(std::ostream& os, const ensemble::EnsembleStats& st) {
    csv::write_row(os, {"t", "a_enstrophy_of_mean", "stderr", "mean_a_enstrophy", "mean_a_enstrophy_stderr"});
    for (std::size_t j = 0; j < st.times.size(); ++j)
        csv::write_reals(os, {st.times[j], st.a_enstrophy_of_mean[j].value, st.a_enstrophy_of_mean[j].std_error,
                              st.mean_a_enstrophy[j].value, st.mean_a_enstrophy[j].std_error});
}

void write_correlations(std::ostream& os, const ensemble::CorrelationTable& t) {
    csv::write_row(os, {"k1", "k2", "tau", "re_C", "im_C", "stderr"});
    for (std::size_t m = 0; m < t.modes.size(); ++m)
        for (std::size_t l = 0; l < t.lags(); ++l)
            csv::write_row(os, {std::to_string(t.modes[m].k1), std::to_string(t.modes[m].k2), format_real(t.tau(l)),
                                format_real(t.value[m][l].real()), format_real(t.value[m][l].imag()),
                                format_real(t.std_error[m][l])});
}

ensemble::CorrelationTable read_correlations(const std::string& path) {
    csv::Table tab;
    try {
        tab = csv::read_table_file(path);
    } catch (const std::exception& e) {
        throw UsageError(std::string("correlation table: ") + e.what());
    }
    if (tab.rows.empty()) throw UsageError("correlation table " + path + " has no rows");
    const auto i1 = tab.column("k1"), i2 = tab.column("k2"), it = tab.column("tau"), ir = tab.column("re_C"),
               ii = tab.column("im_C"), is = tab.column("stderr");
    ensemble::CorrelationTable t;
    std::vector<std::vector<double>> taus;
    for (const auto& row : tab.rows) {
        const WaveVector k{static_cast<int>(csv::parse_int(row[i1])), static_cast<int>(csv::parse_int(row[i2]))};
        auto m = t.find(k);
        if (!m) {
            t.modes.push_back(k);
            t.value.emplace_back();
            t.std_error.emplace_back();
            taus.emplace_back();
            m = t.modes.size() - 1;
        }
        taus[*m].push_back(csv::parse_real(row[it]));
        t.value[*m].emplace_back(csv::parse_real(row[ir]), csv::parse_real(row[ii]));
        t.std_error[*m].push_back(csv::parse_real(row[is]));
    }
    for (const auto& tv : taus)
        if (tv.size() != taus.front().size() || tv != taus.front())
            throw UsageError("correlation table: modes have different lag grids");
    if (taus.front().size() < 2) throw UsageError("correlation table: need at least two lags");
    t.lag_dt = taus.front()[1] - taus.front()[0];
    for (std::size_t j = 0; j < taus.front().size(); ++j)
        if (std::abs(taus.front()[j] - t.tau(j)) > 1e-9 * (1 + taus.front()[j]))
            throw UsageError("correlation table: lags must be uniform from 0");
    t.c0_first_half.assign(t.modes.size(), {});
    t.c0_second_half.assign(t.modes.size(), {});
    return t;
}

// History span and lag window for runs that estimate correlations.
std::size_t lag_steps(const Config& c) {
    const double dt = c.real("history_dt");
    if (!(dt > 0)) throw UsageError("history_dt must be positive");
    const double max_lag = c.real("max_lag");
    if (!(max_lag > 0)) throw UsageError("max_lag must be positive");
    if (max_lag >= c.real("t_end")) throw UsageError("max_lag must be shorter than t_end");
    return static_cast<std::size_t>(std::llround(max_lag / dt));
}

ensemble::CorrelationTable correlations_from_run(const Config& c, const ensemble::EnsembleResult& r, RunContext& ctx) {
    auto table = ensemble::estimate_correlations(r.histories, lag_steps(c));
    ctx.write_file("correlations.csv", [&](std::ostream& os) { write_correlations(os, table); });
    ctx.write_file("correlation_stationarity.csv", [&](std::ostream& os) {
        csv::write_row(os, {"k1", "k2", "re_C0_first_half", "re_C0_second_half", "equilibrium"});
        const FlowParams fp{c.real("a"), c.real("T"), 1};
        for (std::size_t m = 0; m < table.modes.size(); ++m)
            csv::write_row(os, {std::to_string(table.modes[m].k1), std::to_string(table.modes[m].k2),
                                format_real(table.c0_first_half[m].real()), format_real(table.c0_second_half[m].real()),
                                format_real(spectral::equilibrium_variance(table.modes[m], fp))});
    });
    return table;
}

std::vector<ParamSpec> history_params() {
    return {
        {"correlations", "1", Kind::Boolean, "record sampled-mode histories and estimate correlations"},
        {"history_dt", "0.05", Kind::Real, "lag grid spacing"},
        {"max_lag", "", Kind::Real, "largest lag (default: min(5, t_end / 2))"},
    };
}

ensemble::EnsembleResult run_mc(const Config& c, bool equilibrium, bool histories, SpectralField& initial) {
    auto setup = euler_setup(c, equilibrium);
    if (histories) {
        setup.ens.history_dt = c.real("history_dt");
        setup.ens.history_end = c.real("t_end");
        lag_steps(c);
    }
    initial = setup.initial;
    return ensemble::run_ensemble(setup.ens);
}

void write_initial(RunContext& ctx, const SpectralField& f) {
    ctx.write_file("initial_resolved.csv", [&](std::ostream& os) { spectral::write_snapshot(os, f); });
}

// ---------------------------------------------------------------- euler-mc

int cmd_euler_mc(const Config& c, RunContext& ctx) {
    const bool equilibrium = c.flag("equilibrium");
    const bool histories = c.flag("correlations");
    SpectralField initial;
    const auto r = run_mc(c, equilibrium, histories, initial);
    write_initial(ctx, initial);
    ctx.write_file("aenstrophy_full.csv", [&](std::ostream& os) { write_aenstrophy(os, r.stats); });

    const ModePartition p{equilibrium ? 0 : static_cast<int>(c.integer("m")), static_cast<int>(c.integer("sampled_bound"))};
    ctx.write_file("mean_field.csv", [&](std::ostream& os) {
        csv::write_row(os, {"t", "k1", "k2", "re_c", "im_c", "stderr"});
        const auto& modes = initial.lattice().modes();
        for (std::size_t j = 0; j < r.stats.times.size(); ++j)
            for (std::size_t i = 0; i < modes.size(); ++i) {
                if (!p.resolved(modes[i])) continue;
                const auto v = r.stats.mean[j].amplitude(i);
                csv::write_row(os, {format_real(r.stats.times[j]), std::to_string(modes[i].k1),
                                    std::to_string(modes[i].k2), format_real(v.real()), format_real(v.imag()),
                                    format_real(r.stats.mean_std_error[j][i])});
            }
    });
    if (histories) correlations_from_run(c, r, ctx);
    const auto& z = r.stats.a_enstrophy_of_mean;
    ctx.out << "euler-mc: A-enstrophy of the mean " << format_real(z.front().value) << " -> "
            << format_real(z.back().value) << " over " << r.stats.ensemble << " realizations\n";
    return kSuccess;
}

// ---------------------------------------------------------------- euler-correlations

int cmd_euler_correlations(const Config& c, RunContext& ctx) {
    ensemble::CorrelationTable table;
    const std::string& input = c.text("input");
    if (!input.empty()) {
        table = read_correlations(input);
    } else {
        SpectralField initial;
        const auto r = run_mc(c, c.flag("equilibrium"), true, initial);
        write_initial(ctx, initial);
        table = correlations_from_run(c, r, ctx);
    }
    const double threshold = c.real("threshold");
    if (!(threshold > 0 && threshold < 1)) throw UsageError("threshold must lie in (0, 1)");
    const long long band = c.integer("band_m");

    const auto fits = ensemble::fit_all_widths(table, threshold);
    for (const auto& k : fits.failed)
        ctx.err << "warning: no width fit for mode (" << k.k1 << "," << k.k2 << ")\n";
    std::vector<std::pair<WaveVector, double>> in_band;
    for (const auto& w : fits.widths)
        if (w.first.linf() > band) in_band.push_back(w);
    const auto model = ensemble::fit_width_model(in_band);
    std::optional<ensemble::WidthModel> all;
    if (fits.widths.size() >= 3) all = ensemble::fit_width_model(fits.widths);

    ctx.write_file("widths.csv", [&](std::ostream& os) {
        csv::write_row(os, {"k1", "k2", "sigma", "sigma_times_k"});
        for (const auto& [k, s] : fits.widths)
            csv::write_row(os, {std::to_string(k.k1), std::to_string(k.k2), format_real(s), format_real(s * k.norm())});
    });
    ctx.write_file("width_model.csv", [&](std::ostream& os) {
        csv::write_row(os, {"c", "residual", "fitted", "failed", "band_m", "c_all", "residual_all"});
        csv::write_row(os, {format_real(model.c), format_real(model.residual), std::to_string(in_band.size()),
                            std::to_string(fits.failed.size()), std::to_string(band),
                            all ? format_real(all->c) : "nan", all ? format_real(all->residual) : "nan"});
    });
    ctx.out << "euler-correlations: c = " << format_real(model.c) << ", coefficient of variation "
            << format_real(model.residual) << " over " << in_band.size() << " modes with |k|_inf > " << band << "\n";
    return kSuccess;
}

// ---------------------------------------------------------------- euler-sop

ensemble::WidthModel width_model(const Config& c) {
    ensemble::WidthModel wm;
    const bool has_c = !c.text("c").empty();
    const bool has_file = !c.text("width_model").empty();
    if (has_c == has_file) throw UsageError("give exactly one of c or width_model");
    if (has_c) {
        wm.c = c.real("c");
    } else {
        try {
            wm.c = csv::read_table_file(c.text("width_model")).reals("c").at(0);
        } catch (const std::exception& e) {
            throw UsageError(std::string("width model: ") + e.what());
        }
    }
    if (!(wm.c >= 0) || !std::isfinite(wm.c)) throw UsageError("width constant c must be finite and >= 0");
    return wm;
}

int cmd_euler_sop(const Config& c, RunContext& ctx) {
    const auto wm = width_model(c);
    auto setup = euler_setup(c, false);
    reduced::ReducedOptions opt;
    opt.noise = c.flag("noise");
    opt.damping = c.flag("damping");
    opt.noise_grid_dt = c.real("noise_grid_dt");
    const std::string& form = c.text("gamma_form");
    if (form == "balanced") opt.gamma.form = dynamics::GammaForm::Balanced;
    else if (form == "printed") opt.gamma.form = dynamics::GammaForm::AsPrinted;
    else throw UsageError("gamma_form must be balanced or printed");
    const std::string& src = c.text("sigma_source");
    if (src == "sampled") opt.gamma.sigma_source = dynamics::SigmaSource::SampledQ;
    else if (src == "resolved") opt.gamma.sigma_source = dynamics::SigmaSource::ResolvedK;
    else throw UsageError("sigma_source must be sampled or resolved");

    const auto st = reduced::run_reduced_ensemble(setup.ens, wm, opt);
    write_initial(ctx, setup.initial);
    ctx.write_file("aenstrophy_reduced.csv", [&](std::ostream& os) { write_aenstrophy(os, st); });
    ctx.out << "euler-sop: A-enstrophy of the mean " << format_real(st.a_enstrophy_of_mean.front().value) << " -> "
            << format_real(st.a_enstrophy_of_mean.back().value) << " over " << st.ensemble << " realizations\n";
    return kSuccess;
}

// ---------------------------------------------------------------- compare

struct Curve {
    std::vector<double> t;
    std::vector<ensemble::Measured> z;
};

Curve read_curve(const std::string& path) {
    try {
        const auto tab = csv::read_table_file(path);
        Curve c;
        c.t = tab.reals("t");
        const auto v = tab.reals("a_enstrophy_of_mean");
        const auto se = tab.reals("stderr");
        for (std::size_t j = 0; j < v.size(); ++j) c.z.push_back({v[j], se[j]});
        if (c.t.empty()) throw std::runtime_error("no rows");
        return c;
    } catch (const std::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

int cmd_compare(const Config& c, RunContext& ctx) {
    if (c.text("full").empty() || c.text("reduced").empty()) throw UsageError("compare needs full and reduced curves");
    const auto full = read_curve(c.text("full"));
    const auto red = read_curve(c.text("reduced"));
    if (full.t.size() != red.t.size()) throw UsageError("time grids do not match (different lengths)");
    for (std::size_t j = 0; j < full.t.size(); ++j)
        if (std::abs(full.t[j] - red.t[j]) > 1e-9 * (1 + std::abs(full.t[j])))
            throw UsageError("time grids do not match at row " + std::to_string(j + 1));
    const double tol = c.real("tolerance");
    const double decay = c.real("decay");
    if (!(tol > 0)) throw UsageError("tolerance must be positive");
    if (!(decay > 0 && decay < 1)) throw UsageError("decay must lie in (0, 1)");

    ensemble::DecayComparison r;
    try {
        r = ensemble::compare_decay(full.t, full.z, red.z, decay, c.real("monotone_after"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const bool pass = r.passed(tol);
    std::ostringstream rep;
    rep << "window_end " << format_real(r.t_star) << (r.reference_decayed ? "" : " (full curve never decayed by the window fraction)") << "\n"
        << "max_relative_deviation " << format_real(r.max_deviation) << " at t=" << format_real(r.worst_time) << "\n"
        << "decay_at_window_end full " << format_real(r.reference_decay) << " reduced " << format_real(r.candidate_decay) << "\n"
        << "decay_at_last_time full " << format_real(r.reference_final_decay) << " reduced "
        << format_real(r.candidate_final_decay) << "\n"
        << "monotone full " << (r.reference_monotone ? "yes" : "no") << " reduced "
        << (r.candidate_monotone ? "yes" : "no") << "\n"
        << "tolerance " << format_real(tol) << "\n"
        << "result " << (pass ? "PASS" : "FAIL") << "\n";
    ctx.out << rep.str();
    ctx.write_file("compare_report.txt", [&](std::ostream& os) { os << rep.str(); });
    return pass ? kSuccess : kComparison;
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<CommandSpec> build_commands() {
    std::vector<CommandSpec> v;
    v.push_back({"hald", "Hald system: ensemble mean, first-order OP and Galerkin trajectories",
                 {
                     {"q1", "1", Kind::Real, "observed q1 at t=0"},
                     {"p1", "1", Kind::Real, "observed p1 at t=0"},
                     {"T", "1", Kind::Real, "temperature"},
                     {"ensemble", "1000", Kind::Integer, "number of realizations"},
                     {"t_end", "40", Kind::Real, "final time"},
                     {"dt_out", "0.5", Kind::Real, "output spacing"},
                     {"seed", "1", Kind::Integer, "master seed"},
                     {"tol", "1e-8", Kind::Real, "integrator tolerance per unit time"},
                     {"workers", "1", Kind::Integer, "worker threads (never changes results)"},
                 },
                 {},
                 cmd_hald});
    v.push_back({"langevin", "Ornstein-Uhlenbeck fluctuation/dissipation check",
                 {
                     {"gamma", "1", Kind::Real, "damping"},
                     {"noise_q", "2", Kind::Real, "white-noise intensity"},
                     {"step", "1e-3", Kind::Real, "Euler-Maruyama step"},
                     {"t_end", "20", Kind::Real, "path length"},
                     {"ensemble", "1000", Kind::Integer, "number of paths"},
                     {"u0", "0", Kind::Real, "initial value for the variance curve"},
                     {"stride", "100", Kind::Integer, "steps between variance-curve rows"},
                     {"seed", "1", Kind::Integer, "master seed"},
                     {"workers", "1", Kind::Integer, "worker threads (never changes results)"},
                 },
                 {},
                 cmd_langevin});
    v.push_back({"euler-mc", "Monte Carlo over the truncated averaged Euler system",
                 concat(concat(euler_params("10", "200"), history_params()),
                        {{"equilibrium", "0", Kind::Boolean, "no resolved modes (all modes sampled)"}}),
                 resolve_preset, cmd_euler_mc});
    v.push_back({"euler-correlations", "Autocorrelation widths and the sigma(k) = c/|k| model",
                 concat(concat(euler_params("10", "200"), history_params()),
                        {{"equilibrium", "0", Kind::Boolean, "no resolved modes (all modes sampled)"},
                         {"input", "", Kind::Text, "correlations.csv from euler-mc (skips the Monte Carlo run)"},
                         {"threshold", "0.1", Kind::Real, "fit lags with C > threshold * C(0)"},
                         {"band_m", "", Kind::Integer, "fit the model over |k|_inf > band_m (default: m of the preset)"}}),
                 [](Config& c, const std::set<std::string>& user) {
                     resolve_preset(c, user);
                     if (!user.count("band_m")) c.set("band_m", c.text("m"));
                 },
                 cmd_euler_correlations});
    v.push_back({"euler-sop", "Stochastic reduced model for the resolved modes",
                 concat(euler_params("10", "200"),
                        {{"c", "", Kind::Real, "width constant in sigma(k) = c/|k|"},
                         {"width_model", "", Kind::Text, "width_model.csv from euler-correlations"},
                         {"gamma_form", "balanced", Kind::Text, "damping closed form: balanced or printed"},
                         {"sigma_source", "sampled", Kind::Text, "width in the damping sum: sampled (q) or resolved (k)"},
                         {"noise", "1", Kind::Boolean, "include the colored-noise term"},
                         {"damping", "1", Kind::Boolean, "include the damping term"},
                         {"noise_grid_dt", "0", Kind::Real, "noise grid spacing (0: min sigma / 8)"}}),
                 resolve_preset, cmd_euler_sop});
    v.push_back({"compare", "Compare full and reduced A-enstrophy decay curves",
                 {
                     {"full", "", Kind::Text, "aenstrophy_full.csv"},
                     {"reduced", "", Kind::Text, "aenstrophy_reduced.csv"},
                     {"tolerance", "0.1", Kind::Real, "largest allowed relative deviation"},
                     {"decay", "0.2", Kind::Real, "window ends when the full curve has decayed by this fraction"},
                     {"monotone_after", "0.5", Kind::Real, "monotonicity is checked from this time on"},
                 },
                 {},
                 cmd_compare});
    return v;
}

}  // namespace

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> v = build_commands();
    return v;
}

const CommandSpec* find_command(const std::string& name) {
    for (const auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace optpred::cli
