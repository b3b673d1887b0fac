#ifndef TMSIM_IO_HPP
#define TMSIM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tmsim::io {

inline constexpr const char* k_version = "1.0.0";

/// Shortest round-trippable decimal form of a double.
std::string fmt_double(double v);

/// FNV-1a 64-bit hash, hex-encoded.
std::string fnv1a_hex(const std::string& data);

struct CsvMetadata {
    std::string schema;      // e.g. "widths.v1"
    std::string config_hash; // hex
    uint64_t seed = 0;
};

/// Numeric trace with named columns; rows stored row-major.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Writes "# key=value" metadata lines, a column-header line, then one CSV row
/// per entry, formatted so re-parsing reproduces the values exactly.
void write_table(const std::filesystem::path& path, const CsvMetadata& meta, const Table& table);

/// Reads a table written by write_table ("#" lines skipped).
Table read_table(const std::filesystem::path& path);

/// Writes a matrix-shaped CSV (used for Wigner grids and Fock tables):
/// first data row holds the column coordinates, each following row starts with
/// its row coordinate.
void write_matrix(const std::filesystem::path& path, const CsvMetadata& meta,
                  const std::string& corner_label, const std::vector<double>& row_coords,
                  const std::vector<double>& col_coords,
                  const std::vector<std::vector<double>>& values);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace tmsim::io

#endif
