#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"

namespace optpred::cli {

struct RunContext {
    std::filesystem::path out_dir;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> outputs;

    /// Writes `name` under out_dir in binary mode and records it for the manifest.
    void write_file(const std::string& name, const std::function<void(std::ostream&)>& body);
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<ParamSpec> params;
    /// Fills settings whose defaults depend on others; `user` holds the keys
    /// given explicitly.
    std::function<void(Config&, const std::set<std::string>& user)> resolve;
    std::function<int(const Config&, RunContext&)> run;
};

const std::vector<CommandSpec>& commands();
const CommandSpec* find_command(const std::string& name);

}  // namespace optpred::cli
