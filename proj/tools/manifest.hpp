#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace optpred::cli {

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string fnv1a_file(const std::string& path);

struct OutputRecord {
    std::string file;  // relative to the output directory
    std::string fnv1a;
};

struct RunManifest {
    std::string command;
    std::string version;
    Settings config;
    std::uint64_t master_seed = 0;
    std::vector<OutputRecord> outputs;
    double wall_clock_seconds = 0;
    std::string reduction_order;

    void write(const std::string& path) const;
    static RunManifest read(const std::string& path);
};

extern const char* const kReductionOrder;

}  // namespace optpred::cli
