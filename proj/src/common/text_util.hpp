#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpfs/error.hpp"

namespace qpfs::detail {

// Lines without their terminators; a trailing newline does not add a line.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_blanks(std::string_view line);
std::string_view trim(std::string_view s);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Numeric order when both parse as numbers, lexicographic otherwise.
bool symbol_less(std::string_view a, std::string_view b);

std::string read_file(const std::filesystem::path& path, ErrorKind kind);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace qpfs::detail
