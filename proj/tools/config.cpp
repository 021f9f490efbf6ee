#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "optpred/csv.hpp"

namespace optpred::cli {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

void Config::set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = std::move(value);
            return;
        }
    entries_.emplace_back(key, std::move(value));
}

bool Config::has(const std::string& key) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& Config::text(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    throw UsageError("missing setting '" + key + "'");
}

double Config::real(const std::string& key) const {
    try {
        return csv::parse_real(text(key));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("setting '" + key + "' is not a number: '" + text(key) + "'");
    }
}

long long Config::integer(const std::string& key) const {
    try {
        return csv::parse_int(text(key));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("setting '" + key + "' is not an integer: '" + text(key) + "'");
    }
}

std::size_t Config::count(const std::string& key) const {
    const long long v = integer(key);
    if (v < 0) throw UsageError("setting '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
}

bool Config::flag(const std::string& key) const {
    const std::string& v = text(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw UsageError("setting '" + key + "' is not a boolean: '" + v + "'");
}

Settings read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    Settings out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

Settings read_config_file(const std::string& path) {
    if (path.size() < 5 || path.substr(path.size() - 5) != ".json") return read_key_value_file(path);
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) throw UsageError(path + ": no \"config\" object");
    Settings out;
    for (const auto& [k, v] : j["config"].items()) {
        if (!v.is_string()) throw UsageError(path + ": config values must be strings");
        out.emplace_back(k, v.get<std::string>());
    }
    return out;
}

}  // namespace optpred::cli
