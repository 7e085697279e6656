// results.hpp — self-contained result files
//
// CSV output carries a '#'-prefixed metadata block (command, seed, resolved
// config as one-line JSON, warnings) followed by a header row and numeric
// columns printed with shortest-round-trip formatting (lossless at 17
// significant digits). A JSON mode carries the same fields structurally.
// The embedded config is complete: re-running the command from it reproduces
// the data columns exactly.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace zenodot::io {

struct ResultFile {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json config;             // fully resolved configuration
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> warnings;
};

std::string to_csv(const ResultFile& r);
std::string to_json_text(const ResultFile& r);

// writes csv or json by `format` ("csv" | "json"); IoError on failure
void write_result(const ResultFile& r, const std::string& path,
                  const std::string& format);

// reads back a CSV result file (metadata + columns); IoError / ConfigError
ResultFile read_csv_result(const std::string& path);

// shortest round-trip decimal representation of a double
std::string format_double(double x);

}  // namespace zenodot::io
