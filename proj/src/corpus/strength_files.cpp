#include <fstream>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/corpus.hpp"

namespace hashecon::corpus {

namespace {

double parse_bits(const std::string& field, const std::string& source, std::size_t line) {
  csv::Table ctx;
  ctx.source = source;
  ctx.line_numbers = {line};
  double v = csv::to_double(field, ctx, 0);
  if (!(v >= 0.0)) throw ParseError(source, line, "strength_bits must be >= 0");
  return v;
}

}  // namespace

// Streams the file line by line: per-password files can hold tens of millions of rows.
StrengthFile read_strength_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open strength file " + path.string());
  const std::string source = path.string();

  enum class Shape { unknown, aggregate, per_password } shape = Shape::unknown;
  std::size_t first = 0, second = 1;
  std::vector<std::pair<double, std::uint64_t>> weighted;
  StrengthFile out;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = text::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto fields = csv::split_line(line, source, line_no);
    if (shape == Shape::unknown) {
      if (fields.size() != 2) throw ParseError(source, line_no, "expected a two-column header");
      if (fields[0] == "strength_bits" && fields[1] == "count") {
        shape = Shape::aggregate;
      } else if (fields[0] == "password" && fields[1] == "strength_bits") {
        shape = Shape::per_password;
      } else if (fields[1] == "password" && fields[0] == "strength_bits") {
        shape = Shape::per_password;
        first = 1, second = 0;
      } else {
        throw ParseError(source, line_no,
                         "header must be 'strength_bits,count' or 'password,strength_bits'");
      }
      continue;
    }
    if (fields.size() != 2) throw ParseError(source, line_no, "expected 2 fields");
    if (shape == Shape::aggregate) {
      csv::Table ctx;
      ctx.source = source;
      ctx.line_numbers = {line_no};
      weighted.emplace_back(parse_bits(fields[0], source, line_no), csv::to_uint(fields[1], ctx, 0));
    } else {
      if (fields[first].empty()) throw ParseError(source, line_no, "empty password");
      out.records.push_back(PasswordRecord{fields[first], parse_bits(fields[second], source, line_no)});
    }
  }
  if (shape == Shape::unknown) throw ParseError(source, 0, "empty strength file");
  if (shape == Shape::aggregate) {
    try {
      out.aggregate = StrengthDistribution::exact_weighted(std::move(weighted));
    } catch (const EmptyCorpusError&) {
      throw EmptyCorpusError("strength file " + source + " has no counted rows");
    }
  } else if (out.records.empty()) {
    throw EmptyCorpusError("strength file " + source + " has no rows");
  }
  return out;
}

}  // namespace hashecon::corpus
