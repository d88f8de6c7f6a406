#pragma once

#include <string>
#include <vector>

namespace pu::csv {

/// Shortest decimal string that parses back to exactly the same double.
/// All CSV emission goes through this so that reports are byte-stable
/// across reruns and round-trip without loss.
std::string format_double(double v);

double parse_double(const std::string& s);
long parse_long(const std::string& s);

std::string join_row(const std::vector<std::string>& fields);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments; // lines starting with '#', in order
};

/// Parse a comma-separated file written by this toolkit. Lines starting
/// with '#' are collected separately; the first regular line is the header.
Table read_table(const std::string& path);

void write_lines(const std::string& path, const std::vector<std::string>& lines);

} // namespace pu::csv
