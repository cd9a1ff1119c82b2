#include "voltlift/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "voltlift/version.hpp"

namespace voltlift::io {

std::string csv_encode(const CsvTable& t) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (i) os << ',';
        os << t.header[i];
    }
    os << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size())
            throw std::invalid_argument("csv_encode: row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << '\n';
    }
    return os.str();
}

CsvTable csv_parse(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("csv_parse: empty input");
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) t.header.push_back(cell);
    }
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream r(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(r, cell, ',')) {
            // strtod instead of stod: subnormal values parse instead of
            // throwing out_of_range
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw std::invalid_argument("csv_parse: non-numeric cell at line " +
                                            std::to_string(lineno));
            row.push_back(v);
        }
        if (row.size() != t.header.size())
            throw std::invalid_argument("csv_parse: row width mismatch at line " +
                                        std::to_string(lineno));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string manifest_json(const Manifest& m) {
    nlohmann::json j;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["wall_seconds"] = m.wall_seconds;
    j["version"] = m.version.empty() ? VOLTLIFT_VERSION : m.version;
    j["subcommand"] = m.subcommand;
    j["outputs"] = m.outputs;
    return j.dump(2) + "\n";
}

}  // namespace voltlift::io
