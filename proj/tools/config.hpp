#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace optpred::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kNumerical = 2, kComparison = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { Real, Integer, Boolean, Text };

struct ParamSpec {
    std::string key;
    std::string default_value;  // empty: resolved by the command (documented in help)
    Kind kind = Kind::Text;
    std::string help;
};

/// Ordered key=value settings with typed accessors. Accessors throw UsageError
/// naming the key when a value does not parse.
class Config {
public:
    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    /// Integer >= 0.
    std::size_t count(const std::string& key) const;
    bool flag(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

using Settings = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` file; '#' starts a comment, blank lines are ignored.
Settings read_key_value_file(const std::string& path);

/// Either a key=value file or a manifest.json (its "config" object).
Settings read_config_file(const std::string& path);

std::string trim(std::string s);

}  // namespace optpred::cli
