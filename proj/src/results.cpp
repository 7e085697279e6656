#include "zenodot/results.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "zenodot/errors.hpp"
#include "zenodot/units.hpp"

namespace zenodot::io {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string to_csv(const ResultFile& r) {
    std::ostringstream out;
    out << "# zenodot " << r.command << " results\n";
    out << "# schema_version: 1\n";
    out << "# code_version: " << code_version << "\n";
    out << "# command: " << r.command << "\n";
    out << "# seed: " << r.seed << "\n";
    out << "# config: " << r.config.dump() << "\n";
    for (const auto& w : r.warnings) out << "# warning: " << w << "\n";
    for (std::size_t c = 0; c < r.columns.size(); ++c)
        out << (c ? "," : "") << r.columns[c];
    out << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << "\n";
    }
    return out.str();
}

std::string to_json_text(const ResultFile& r) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["code_version"] = code_version;
    doc["command"] = r.command;
    doc["seed"] = r.seed;
    doc["config"] = r.config;
    doc["columns"] = r.columns;
    doc["warnings"] = r.warnings;
    // numbers as strings to keep the 17-digit round trip independent of the
    // reader's JSON number handling
    nlohmann::json data = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jrow = nlohmann::json::array();
        for (double x : row) jrow.push_back(format_double(x));
        data.push_back(std::move(jrow));
    }
    doc["data"] = std::move(data);
    return doc.dump(2) + "\n";
}

void write_result(const ResultFile& r, const std::string& path,
                  const std::string& format) {
    if (format != "csv" && format != "json")
        throw ConfigError("write_result: format must be 'csv' or 'json'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << (format == "csv" ? to_csv(r) : to_json_text(r));
    if (!out) throw IoError("failed writing output file: " + path);
}

ResultFile read_csv_result(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open result file: " + path);
    ResultFile r;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto strip = [&](const std::string& tag) -> std::string {
                if (line.rfind(tag, 0) == 0) return line.substr(tag.size());
                return {};
            };
            if (auto v = strip("# command: "); !v.empty()) r.command = v;
            if (auto v = strip("# seed: "); !v.empty())
                r.seed = std::stoull(v);
            if (auto v = strip("# config: "); !v.empty()) {
                try {
                    r.config = nlohmann::json::parse(v);
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError("result file: bad embedded config: " +
                                      std::string(e.what()));
                }
            }
            if (auto v = strip("# warning: "); !v.empty()) r.warnings.push_back(v);
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_done) {
            while (std::getline(ss, cell, ',')) r.columns.push_back(cell);
            header_done = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            double x = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
            if (res.ec != std::errc())
                throw ConfigError("result file: bad numeric cell '" + cell + "'");
            row.push_back(x);
        }
        r.rows.push_back(std::move(row));
    }
    return r;
}

}  // namespace zenodot::io
