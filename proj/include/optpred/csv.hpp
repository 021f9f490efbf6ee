#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace optpred::csv {

/// Locale-independent, round-trip (17 significant digit) formatting.
std::string format_real(double x);

/// Joins already formatted cells with ',' and terminates with '\n'.
void write_row(std::ostream& os, const std::vector<std::string>& cells);
void write_reals(std::ostream& os, const std::vector<double>& values);

std::vector<std::string> split(std::string_view line, char sep = ',');
double parse_real(std::string_view cell);
long long parse_int(std::string_view cell);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws std::runtime_error if absent.
    std::size_t column(std::string_view name) const;
    std::vector<double> reals(std::string_view name) const;
};

/// Reads a header-first comma separated table. Blank lines are skipped.
Table read_table(std::istream& is);
Table read_table_file(const std::string& path);

}  // namespace optpred::csv
