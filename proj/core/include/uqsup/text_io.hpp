#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uqsup {

std::vector<std::byte> read_binary_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the destination, so a
// reader never observes a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::byte> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);

std::vector<std::string_view> split(std::string_view line, char delimiter);
// Splits on '\n', dropping a trailing '\r' per line and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);

double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace uqsup
