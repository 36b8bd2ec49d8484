#pragma once

#include <string>
#include <vector>

namespace levygal {

/// Shortest-safe decimal for a double: 17 significant digits.
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string render_csv(const Table& table);
/// Inverse of render_csv; throws std::runtime_error on ragged rows.
Table parse_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace levygal
