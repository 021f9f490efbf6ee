#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "json.hpp"

namespace optpred::cli {

const char* const kReductionOrder =
    "realizations use make_stream(seed, index) and are reduced in increasing index order; "
    "interaction sums run in lexicographic k' order; worker count never changes results";

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_hex(bytes);
}

void RunManifest::write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = version;
    j["master_seed"] = master_seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto& o : outputs) outs.push_back({{"file", o.file}, {"fnv1a64", o.fnv1a}});
    j["outputs"] = outs;
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["reduction_order"] = reduction_order;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

RunManifest RunManifest::read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open manifest " + path);
    nlohmann::ordered_json j;
    try {
        in >> j;
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        for (const auto& [k, v] : j.at("config").items()) m.config.emplace_back(k, v.get<std::string>());
        for (const auto& o : j.at("outputs")) m.outputs.push_back({o.at("file"), o.at("fnv1a64")});
        m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
        m.reduction_order = j.value("reduction_order", "");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

}  // namespace optpred::cli
