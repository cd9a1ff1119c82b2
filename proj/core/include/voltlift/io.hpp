#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Output contracts: CSV with '.' decimals, ',' separators, mandatory header,
// '\n' line endings; atomic writes (temp file + rename); a JSON manifest per
// run with the config hash, seed, wall time and tool version.

namespace voltlift::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string csv_encode(const CsvTable& t);
CsvTable csv_parse(const std::string& text);

// temp-file + rename so readers never see a partial file
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

struct Manifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::string version;
    std::string subcommand;
    std::vector<std::string> outputs;
};

std::string manifest_json(const Manifest& m);

}  // namespace voltlift::io
