#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hashecon::csv {

/// A parsed CSV file. Blank lines and lines starting with '#' are skipped;
/// `line_numbers[i]` is the physical line of `rows[i]` for error messages.
struct Table {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

Table parse(std::string_view text, std::string source = "<memory>");
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line, std::string_view source, std::size_t line_no);

double to_double(std::string_view field, const Table& t, std::size_t row);
std::int64_t to_int(std::string_view field, const Table& t, std::size_t row);
std::uint64_t to_uint(std::string_view field, const Table& t, std::size_t row);

std::string escape(std::string_view field);

/// Shortest round-trip representation; output is locale-independent.
std::string format_double(double v);

}  // namespace hashecon::csv
