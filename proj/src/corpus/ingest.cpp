#include <array>
#include <fstream>
#include <istream>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/corpus.hpp"

namespace hashecon::corpus {

namespace {

// 0x80..0x9F in windows-1252; 0 marks an undefined byte.
constexpr std::array<char32_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

std::optional<std::string> decode_single_byte(std::string_view line, FallbackEncoding enc) {
  std::u32string cps;
  cps.reserve(line.size());
  for (char ch : line) {
    auto b = static_cast<unsigned char>(ch);
    if (enc == FallbackEncoding::cp1252 && b >= 0x80 && b <= 0x9F) {
      char32_t cp = kCp1252High[b - 0x80];
      if (cp == 0) return std::nullopt;
      cps.push_back(cp);
    } else {
      cps.push_back(b);
    }
  }
  return text::encode_utf8(cps);
}

}  // namespace

FallbackEncoding parse_fallback(std::string_view name) {
  if (name == "none") return FallbackEncoding::none;
  if (name == "latin1" || name == "iso-8859-1") return FallbackEncoding::latin1;
  if (name == "cp1252" || name == "windows-1252") return FallbackEncoding::cp1252;
  throw DomainError("unknown fallback encoding '" + std::string(name) + "'");
}

std::optional<std::string> decode_line(std::string_view line, FallbackEncoding fallback) {
  if (text::is_valid_utf8(line)) return std::string(line);
  if (fallback == FallbackEncoding::none) return std::nullopt;
  return decode_single_byte(line, fallback);
}

IngestResult ingest(std::istream& in, const IngestOptions& options) {
  IngestResult result;
  auto& log = result.log;
  std::string line;
  while (std::getline(in, line)) {
    ++log.lines_read;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto decoded = decode_line(line, options.fallback);
    if (!decoded) {
      ++log.undecodable_removed;
      continue;
    }
    std::size_t len = text::utf8_length(*decoded);
    if (len == 0 || len < options.min_length) {
      ++log.below_min_length_removed;
      continue;
    }
    result.records.push_back(PasswordRecord{std::move(*decoded), 0.0});
  }
  if (in.bad()) throw IoError("read failure while ingesting passwords");
  log.retained = result.records.size();
  if (log.retained == 0) throw EmptyCorpusError("no passwords retained after filtering");
  return result;
}

IngestResult ingest(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open password file " + path.string());
  return ingest(in, options);
}

}  // namespace hashecon::corpus
