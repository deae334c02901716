#include <charconv>

#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::ghscan {

namespace {

int parse_int(std::string_view s, std::string_view whole) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw DomainError(fmt::format("bad date '{}'", whole));
  return v;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw DomainError(fmt::format("bad date '{}'", text));
  std::chrono::year_month_day ymd{std::chrono::year{parse_int(text.substr(0, 4), text)},
                                  std::chrono::month{static_cast<unsigned>(parse_int(text.substr(5, 2), text))},
                                  std::chrono::day{static_cast<unsigned>(parse_int(text.substr(8, 2), text))}};
  if (!ymd.ok()) throw DomainError(fmt::format("bad date '{}'", text));
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') throw DomainError(fmt::format("bad date '{}'", text));
  return Date{ymd};
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

int year_of(Date d) { return static_cast<int>(std::chrono::year_month_day{d}.year()); }

std::string_view RepoRecord::name() const {
  std::string_view f = full_name;
  auto slash = f.find('/');
  return slash == std::string_view::npos ? f : f.substr(slash + 1);
}

void SearchQuery::validate() const {
  if (text::trim(term).empty()) throw DomainError("search term must be nonempty");
  if (created_range && created_range->to < created_range->from) throw DomainError("created range is reversed");
}

std::string SearchQuery::normalized() const {
  validate();
  std::string q = text::ascii_lower(std::string(text::trim(term)));
  if (q.find(' ') != std::string::npos) q = "\"" + q + "\"";
  if (created_range) q += fmt::format(" created:{}..{}", format_date(created_range->from), format_date(created_range->to));
  if (language) q += " language:" + text::ascii_lower(*language);
  auto quoted = [](const std::string& w) { return w.find(' ') != std::string::npos ? "\"" + w + "\"" : w; };
  for (const auto& k : negative_keywords) q += " NOT " + quoted(text::ascii_lower(k));
  for (const auto& p : path_excludes) q += " -path:" + p;
  for (const auto& e : extension_excludes) q += " -extension:" + e;
  return q;
}

SearchQuery SearchQuery::with_range(DateRange r) const {
  SearchQuery q = *this;
  q.created_range = r;
  return q;
}

std::string_view to_string(Endpoint e) { return e == Endpoint::repositories ? "repositories" : "code"; }

}  // namespace hashecon::ghscan
