#include "tmsim/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmsim/errors.hpp"

namespace tmsim::io {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("cannot open output file: " + path.string());
    return os;
}

void write_meta(std::ofstream& os, const CsvMetadata& meta) {
    os << "# tmsim v" << k_version << "\n";
    os << "# schema=" << meta.schema << "\n";
    os << "# config_hash=" << meta.config_hash << "\n";
    os << "# seed=" << meta.seed << "\n";
}

} // namespace

void write_table(const std::filesystem::path& path, const CsvMetadata& meta, const Table& table) {
    auto os = open_out(path);
    write_meta(os, meta);
    for (size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << fmt_double(row[i]);
        os << "\n";
    }
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open file: " + path.string());
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_matrix(const std::filesystem::path& path, const CsvMetadata& meta,
                  const std::string& corner_label, const std::vector<double>& row_coords,
                  const std::vector<double>& col_coords,
                  const std::vector<std::vector<double>>& values) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << corner_label;
    for (double c : col_coords) os << "," << fmt_double(c);
    os << "\n";
    for (size_t i = 0; i < row_coords.size(); ++i) {
        os << fmt_double(row_coords[i]);
        for (double v : values[i]) os << "," << fmt_double(v);
        os << "\n";
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path);
    os << text;
}

} // namespace tmsim::io
