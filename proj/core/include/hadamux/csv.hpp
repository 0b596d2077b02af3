#pragma once

#include "hadamux/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hadamux::csv {

// Shortest round-trip decimal representation ('.' separator, no locale).
// Infinities are written as "inf" / "-inf".
std::string format(double value);

std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string read_file(const std::filesystem::path& path);

// Writes `content` verbatim (binary mode, so LF stays LF). Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

// Dense numeric CSV without header. Blank lines are skipped; ragged rows
// raise IoError naming the line.
Matrix parse_matrix(std::string_view text, std::string_view source = "<memory>");
Matrix read_matrix(const std::filesystem::path& path);

std::string format_matrix(const Matrix& m);
std::string format_int_matrix(const IntMatrix& m);

}  // namespace hadamux::csv
