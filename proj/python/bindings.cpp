#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "optpred/dynamics.hpp"
#include "optpred/ensemble.hpp"
#include "optpred/hald.hpp"
#include "optpred/integrate.hpp"
#include "optpred/langevin.hpp"
#include "optpred/parallel.hpp"
#include "optpred/reduced.hpp"
#include "optpred/spectral.hpp"

namespace py = pybind11;
using namespace optpred;
using spectral::Complex;
using spectral::FlowParams;
using spectral::ModePartition;
using spectral::SpectralField;
using spectral::WaveVector;

namespace {

using ModeMap = std::vector<std::pair<std::pair<int, int>, Complex>>;

WaveVector wv(std::pair<int, int> k) { return {k.first, k.second}; }

ModeMap to_modes(const SpectralField& f) {
    ModeMap out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto k = f.lattice().modes()[i];
        out.push_back({{k.k1, k.k2}, f.amplitude(i)});
    }
    return out;
}

SpectralField from_modes(int bound, const ModeMap& modes) {
    auto f = SpectralField::zeros(bound);
    for (const auto& [k, c] : modes) {
        const auto idx = f.lattice().canonical_index(wv(k));
        if (!idx) throw py::value_error("mode is not a canonical wavevector of the lattice");
        f.set_amplitude(*idx, c);
    }
    return f;
}

py::dict stats_dict(const ensemble::EnsembleStats& s) {
    py::dict d;
    std::vector<double> z, se, mz, mse;
    for (const auto& m : s.a_enstrophy_of_mean) {
        z.push_back(m.value);
        se.push_back(m.std_error);
    }
    for (const auto& m : s.mean_a_enstrophy) {
        mz.push_back(m.value);
        mse.push_back(m.std_error);
    }
    d["t"] = s.times;
    d["a_enstrophy_of_mean"] = z;
    d["stderr"] = se;
    d["mean_a_enstrophy"] = mz;
    d["mean_a_enstrophy_stderr"] = mse;
    d["ensemble"] = s.ensemble;
    return d;
}

ensemble::EnsembleConfig euler_config(int m, int sampled_bound, double a, double T, std::size_t n,
                                      const std::vector<double>& times, std::uint64_t seed,
                                      std::uint64_t init_seed, unsigned workers) {
    ensemble::EnsembleConfig cfg;
    cfg.partition = {m, sampled_bound};
    cfg.params = {a, T, 1};
    cfg.ensemble = n;
    cfg.output_times = times;
    cfg.master_seed = seed;
    cfg.workers = workers;
    auto rng = make_stream(init_seed, 0);
    const auto& p = cfg.partition;
    cfg.initial_resolved =
        spectral::sample_equilibrium(sampled_bound, cfg.params, [&](WaveVector k) { return p.resolved(k); }, rng);
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_optpred, mod) {
    mod.doc() = "Optimal prediction for the 2D averaged Euler equations";

    // integrate
    mod.def(
        "rk4_step",
        [](const std::function<std::vector<double>(double, std::vector<double>)>& f, double t, std::vector<double> y,
           double h) {
            const integrate::Rhs rhs = [&](double tt, std::span<const double> yy, std::span<double> dy) {
                const auto d = f(tt, std::vector<double>(yy.begin(), yy.end()));
                if (d.size() != dy.size()) throw py::value_error("rhs returned the wrong length");
                std::copy(d.begin(), d.end(), dy.begin());
            };
            return integrate::rk4_step(rhs, t, y, h);
        },
        py::arg("rhs"), py::arg("t"), py::arg("y"), py::arg("h"));

    // hald
    mod.def("hald_hamiltonian", [](double q1, double q2, double p1, double p2) {
        return hald::hamiltonian({q1, q2, p1, p2});
    });
    mod.def("hald_renormalized_hamiltonian", [](double q1, double p1, double T) {
        return hald::renormalized_hamiltonian({q1, p1}, hald::Temperature(T));
    });
    mod.def(
        "hald_mean_trajectory",
        [](double q1, double p1, double T, std::size_t n, const std::vector<double>& times, std::uint64_t seed,
           double tol, unsigned workers) {
            py::gil_scoped_release release;
            const auto m = hald::ensemble_mean_trajectory({q1, p1}, hald::Temperature(T), n, times, seed,
                                                          {tol, 1e-2, 1e-12, 0.5}, workers);
            py::gil_scoped_acquire acquire;
            std::vector<double> amp;
            for (std::size_t i = 0; i < m.times.size(); ++i) amp.push_back(m.amplitude(i));
            py::dict d;
            d["t"] = m.times;
            d["mean_q1"] = m.mean_q1;
            d["mean_p1"] = m.mean_p1;
            d["stderr_q1"] = m.stderr_q1;
            d["stderr_p1"] = m.stderr_p1;
            d["amplitude"] = amp;
            return d;
        },
        py::arg("q1"), py::arg("p1"), py::arg("T"), py::arg("ensemble"), py::arg("times"), py::arg("seed") = 1,
        py::arg("tol") = 1e-8, py::arg("workers") = 1);

    // langevin
    mod.def(
        "langevin_stationary_variance",
        [](double gamma, double noise_q, double h, double t_end, std::size_t n, std::uint64_t seed, unsigned workers) {
            const auto e = langevin::stationary_variance_estimate({gamma, noise_q, h, t_end, n}, seed, workers);
            return std::pair{e.value, e.std_error};
        },
        py::arg("gamma"), py::arg("noise_q"), py::arg("h") = 1e-3, py::arg("t_end") = 20.0,
        py::arg("ensemble") = 1000, py::arg("seed") = 1, py::arg("workers") = 1);

    // spectral
    mod.def(
        "a_operator", [](std::pair<int, int> k, double a) { return spectral::a_operator(wv(k), {a, 1.0, 1}); },
        py::arg("k"), py::arg("a") = 1.0);
    mod.def(
        "equilibrium_variance",
        [](std::pair<int, int> k, double a, double T) { return spectral::equilibrium_variance(wv(k), {a, T, 1}); },
        py::arg("k"), py::arg("a") = 1.0, py::arg("T") = 1.0);
    mod.def(
        "sample_equilibrium",
        [](int bound, double a, double T, std::uint64_t seed) {
            auto rng = make_stream(seed, 0);
            return to_modes(spectral::sample_equilibrium(bound, {a, T, 1}, [](WaveVector) { return true; }, rng));
        },
        py::arg("bound"), py::arg("a") = 1.0, py::arg("T") = 1.0, py::arg("seed") = 1,
        "Canonical modes [((k1, k2), amplitude)] of an equilibrium draw.");

    // dynamics
    mod.def(
        "energy", [](int bound, const ModeMap& f, double a) { return dynamics::energy(from_modes(bound, f), {a, 1.0, 1}); },
        py::arg("bound"), py::arg("modes"), py::arg("a") = 1.0);
    mod.def(
        "a_enstrophy",
        [](int bound, const ModeMap& f, double a) { return dynamics::a_enstrophy(from_modes(bound, f), {a, 1.0, 1}); },
        py::arg("bound"), py::arg("modes"), py::arg("a") = 1.0);
    mod.def(
        "full_rhs",
        [](int bound, const ModeMap& f, double a) {
            return to_modes(dynamics::full_rhs(from_modes(bound, f), {0, bound}, {a, 1.0, 1}));
        },
        py::arg("bound"), py::arg("modes"), py::arg("a") = 1.0);

    // ensemble / reduced
    mod.def(
        "euler_mc",
        [](int m, int sampled_bound, std::size_t n, const std::vector<double>& times, double a, double T,
           std::uint64_t seed, std::uint64_t init_seed, unsigned workers) {
            const auto cfg = euler_config(m, sampled_bound, a, T, n, times, seed, init_seed, workers);
            ensemble::EnsembleStats st;
            {
                py::gil_scoped_release release;
                st = ensemble::run_ensemble(cfg).stats;
            }
            return stats_dict(st);
        },
        py::arg("m"), py::arg("sampled_bound"), py::arg("ensemble"), py::arg("times"), py::arg("a") = 1.0,
        py::arg("T") = 1.0, py::arg("seed") = 1, py::arg("init_seed") = 12345, py::arg("workers") = 1);
    mod.def(
        "euler_sop",
        [](int m, int sampled_bound, std::size_t n, const std::vector<double>& times, double c, double a, double T,
           std::uint64_t seed, std::uint64_t init_seed, unsigned workers) {
            const auto cfg = euler_config(m, sampled_bound, a, T, n, times, seed, init_seed, workers);
            ensemble::WidthModel model;
            model.c = c;
            ensemble::EnsembleStats st;
            {
                py::gil_scoped_release release;
                st = reduced::run_reduced_ensemble(cfg, model);
            }
            return stats_dict(st);
        },
        py::arg("m"), py::arg("sampled_bound"), py::arg("ensemble"), py::arg("times"), py::arg("c"),
        py::arg("a") = 1.0, py::arg("T") = 1.0, py::arg("seed") = 1, py::arg("init_seed") = 12345,
        py::arg("workers") = 1);
    mod.def(
        "compare_decay",
        [](const std::vector<double>& t, const std::vector<double>& full, const std::vector<double>& reduced,
           double decay, double monotone_after) {
            std::vector<ensemble::Measured> a, b;
            for (double v : full) a.push_back({v, 0.0});
            for (double v : reduced) b.push_back({v, 0.0});
            const auto r = ensemble::compare_decay(t, a, b, decay, monotone_after);
            py::dict d;
            d["t_star"] = r.t_star;
            d["max_deviation"] = r.max_deviation;
            d["reference_decay"] = r.reference_decay;
            d["candidate_decay"] = r.candidate_decay;
            return d;
        },
        py::arg("t"), py::arg("full"), py::arg("reduced"), py::arg("decay") = 0.2, py::arg("monotone_after") = 0.5);

    // command line
    mod.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the optpred command line; returns (exit_code, stdout, stderr).");
}
