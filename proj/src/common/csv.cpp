#include "hashecon/common/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"

namespace hashecon::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ParseError(source, 1, fmt::format("missing column '{}'", name));
}

bool Table::has_column(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

std::vector<std::string> split_line(std::string_view line, std::string_view source, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? field : text::trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(std::string(source), line_no, "unterminated quoted field");
  out.push_back(was_quoted ? field : text::trim(field));
  return out;
}

Table parse(std::string_view text, std::string source) {
  Table t;
  t.source = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string stripped = text::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto fields = split_line(line, t.source, line_no);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ParseError(t.source, line_no,
                       fmt::format("expected {} fields, found {}", t.header.size(), fields.size()));
    }
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError(t.source, 0, "empty file (no header row)");
  return t;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

namespace {

template <typename T>
T parse_number(std::string_view field, const Table& t, std::size_t row, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    std::size_t line = row < t.line_numbers.size() ? t.line_numbers[row] : 0;
    throw ParseError(t.source, line, fmt::format("invalid {} '{}'", what, field));
  }
  return value;
}

}  // namespace

double to_double(std::string_view field, const Table& t, std::size_t row) {
  return parse_number<double>(field, t, row, "number");
}

std::int64_t to_int(std::string_view field, const Table& t, std::size_t row) {
  return parse_number<std::int64_t>(field, t, row, "integer");
}

std::uint64_t to_uint(std::string_view field, const Table& t, std::size_t row) {
  return parse_number<std::uint64_t>(field, t, row, "nonnegative integer");
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace hashecon::csv
