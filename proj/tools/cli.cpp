#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "commands.hpp"
#include "manifest.hpp"

#ifndef OPTPRED_VERSION
#define OPTPRED_VERSION "unknown"
#endif

namespace optpred::cli {

namespace {

std::string dashed(std::string key) {
    for (auto& ch : key)
        if (ch == '_') ch = '-';
    return key;
}

struct SubState {
    const CommandSpec* spec = nullptr;
    CLI::App* app = nullptr;
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::map<std::string, CLI::Option*> options;
    std::vector<std::string> positional;
};

RunManifest execute(const CommandSpec& spec, const Settings& user_settings, const std::string& out_dir,
                    std::ostream& out, std::ostream& err, int& code) {
    Config cfg;
    std::set<std::string> user;
    for (const auto& p : spec.params) cfg.set(p.key, p.default_value);
    for (const auto& [k, v] : user_settings) {
        const bool known = std::any_of(spec.params.begin(), spec.params.end(), [&](const ParamSpec& p) { return p.key == k; });
        if (!known) throw UsageError("unknown setting '" + k + "' for " + spec.name);
        cfg.set(k, v);
        user.insert(k);
    }
    if (spec.resolve) spec.resolve(cfg, user);

    std::filesystem::create_directories(out_dir);
    RunContext ctx{out_dir, out, err, {}};
    const auto start = std::chrono::steady_clock::now();
    code = spec.run(cfg, ctx);
    const auto stop = std::chrono::steady_clock::now();

    RunManifest m;
    m.command = spec.name;
    m.version = OPTPRED_VERSION;
    m.config = cfg.entries();
    m.master_seed = cfg.has("seed") ? static_cast<std::uint64_t>(cfg.count("seed")) : 0;
    for (const auto& f : ctx.outputs) m.outputs.push_back({f, fnv1a_file((ctx.out_dir / f).string())});
    m.wall_clock_seconds = std::chrono::duration<double>(stop - start).count();
    m.reduction_order = kReductionOrder;
    m.write((ctx.out_dir / "manifest.json").string());
    return m;
}

template <class F>
int guarded(std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
}

}  // namespace

std::string default_output_dir() {
    if (const char* env = std::getenv("OPTPRED_OUTPUT_DIR"); env && *env) return env;
    return "optpred_out";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal prediction experiments: Hald system, Langevin check, averaged Euler Monte Carlo "
                 "and the stochastic reduced model.",
                 "optpred"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", OPTPRED_VERSION);

    std::vector<std::unique_ptr<SubState>> states;
    for (const auto& spec : commands()) {
        auto st = std::make_unique<SubState>();
        st->spec = &spec;
        st->app = app.add_subcommand(spec.name, spec.help);
        st->app->add_option("--config", st->config, "key=value file or manifest.json to start from");
        st->app->add_option("--set", st->sets, "override as key=value (repeatable)");
        st->app->add_option("--out", st->out, "output directory (default: $OPTPRED_OUTPUT_DIR or ./optpred_out)");
        for (const auto& p : spec.params) {
            std::string help = p.help;
            if (!p.default_value.empty()) help += " [" + p.default_value + "]";
            if (p.kind == Kind::Boolean)
                st->options[p.key] = st->app->add_flag("--" + dashed(p.key), st->flags[p.key], help);
            else
                st->options[p.key] = st->app->add_option("--" + dashed(p.key), st->values[p.key], help);
        }
        if (spec.name == "compare") st->app->add_option("curves", st->positional, "full and reduced curves")->expected(0, 2);
        states.push_back(std::move(st));
    }

    std::string manifest_path, rerun_out, rerun_workers;
    auto* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest and verify output checksums");
    rerun->add_option("manifest", manifest_path, "manifest.json of the original run")->required();
    rerun->add_option("--out", rerun_out, "output directory for the rerun")->required();
    rerun->add_option("--workers", rerun_workers, "worker count for the rerun");

    std::vector<const char*> argv{"optpred"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    if (rerun->parsed()) {
        return guarded(err, [&] {
            const auto original = RunManifest::read(manifest_path);
            const CommandSpec* spec = find_command(original.command);
            if (!spec) throw UsageError("manifest names unknown command '" + original.command + "'");
            Settings settings = original.config;
            if (!rerun_workers.empty())
                for (auto& [k, v] : settings)
                    if (k == "workers") v = rerun_workers;
            int code = kSuccess;
            const auto again = execute(*spec, settings, rerun_out, out, err, code);
            std::size_t mismatches = 0;
            for (const auto& o : original.outputs) {
                const auto it = std::find_if(again.outputs.begin(), again.outputs.end(),
                                             [&](const OutputRecord& r) { return r.file == o.file; });
                if (it == again.outputs.end() || it->fnv1a != o.fnv1a) {
                    err << "checksum mismatch: " << o.file << "\n";
                    ++mismatches;
                }
            }
            if (again.outputs.size() != original.outputs.size()) ++mismatches;
            out << "rerun: " << (mismatches ? "outputs differ" : "all outputs reproduced bitwise") << " ("
                << original.outputs.size() << " files)\n";
            if (mismatches) return static_cast<int>(kComparison);
            return static_cast<int>(kSuccess);
        });
    }

    for (const auto& st : states) {
        if (!st->app->parsed()) continue;
        return guarded(err, [&] {
            Settings settings;
            if (!st->config.empty()) settings = read_config_file(st->config);
            for (const auto& s : st->sets) {
                const auto eq = s.find('=');
                if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
                settings.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
            }
            for (const auto& p : st->spec->params) {
                if (!st->options[p.key]->count()) continue;
                settings.emplace_back(p.key, p.kind == Kind::Boolean ? (st->flags[p.key] ? "1" : "0") : st->values[p.key]);
            }
            if (st->positional.size() >= 1) settings.emplace_back("full", st->positional[0]);
            if (st->positional.size() >= 2) settings.emplace_back("reduced", st->positional[1]);
            int code = kSuccess;
            execute(*st->spec, settings, st->out.empty() ? default_output_dir() : st->out, out, err, code);
            return code;
        });
    }
    return kUsage;
}

}  // namespace optpred::cli
