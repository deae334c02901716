#include <algorithm>
#include <cctype>
#include <fstream>

#include <fmt/format.h>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::ghscan {

FilterResult filter_spam(std::span<const RepoRecord> records, std::uint64_t per_user_threshold,
                         const std::set<std::string>& allowlist) {
  if (per_user_threshold < 1) throw DomainError("spam threshold must be >= 1");
  std::map<std::string, std::uint64_t> per_owner;
  for (const auto& r : records) ++per_owner[text::ascii_lower(r.owner)];
  std::set<std::string> allowed;
  for (const auto& a : allowlist) allowed.insert(text::ascii_lower(a));
  FilterResult out;
  for (const auto& r : records) {
    const auto owner = text::ascii_lower(r.owner);
    if (per_owner[owner] >= per_user_threshold && !allowed.count(owner)) {
      ++out.removed;
    } else {
      out.records.push_back(r);
    }
  }
  return out;
}

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool single_short_word(const std::string& k, std::size_t max_len) {
  return k.size() <= max_len && std::all_of(k.begin(), k.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

}  // namespace

KeywordMatcher::KeywordMatcher(std::vector<std::string> keywords, std::size_t short_word_length) {
  for (auto& k : keywords) {
    auto w = text::ascii_lower(text::trim(k));
    if (w.empty()) continue;
    bounded_.push_back(single_short_word(w, short_word_length));
    keywords_.push_back(std::move(w));
  }
}

KeywordMatcher KeywordMatcher::load(const std::filesystem::path& path, std::size_t short_word_length) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto w = text::trim(line);
    if (w.empty() || w[0] == '#') continue;
    words.push_back(w);
  }
  return KeywordMatcher(std::move(words), short_word_length);
}

bool KeywordMatcher::matches(std::string_view raw) const {
  const std::string s = text::ascii_lower(raw);
  for (std::size_t i = 0; i < keywords_.size(); ++i) {
    const auto& k = keywords_[i];
    for (auto pos = s.find(k); pos != std::string::npos; pos = s.find(k, pos + 1)) {
      if (!bounded_[i]) return true;
      const bool left = pos == 0 || !is_word_char(s[pos - 1]);
      const bool right = pos + k.size() == s.size() || !is_word_char(s[pos + k.size()]);
      if (left && right) return true;
    }
  }
  return false;
}

bool KeywordMatcher::matches(const RepoRecord& r) const {
  if (matches(r.name())) return true;
  if (r.description && matches(*r.description)) return true;
  return std::any_of(r.topics.begin(), r.topics.end(), [&](const std::string& t) { return matches(t); });
}

FilterResult filter_keywords(std::span<const RepoRecord> records, const KeywordMatcher& exclusions) {
  FilterResult out;
  for (const auto& r : records) {
    if (exclusions.matches(r)) {
      ++out.removed;
    } else {
      out.records.push_back(r);
    }
  }
  return out;
}

RelevanceSplit relevance_filter(std::span<const RepoRecord> records, const KeywordMatcher& relevancy_words,
                                std::span<const std::string> similar_names) {
  std::vector<std::string> names;
  for (const auto& n : similar_names) {
    auto w = text::ascii_lower(text::trim(n));
    if (!w.empty()) names.push_back(std::move(w));
  }
  RelevanceSplit out;
  for (const auto& r : records) {
    const bool relevant = relevancy_words.matches(r);
    const auto name = text::ascii_lower(r.name());
    const bool similar =
        std::any_of(names.begin(), names.end(), [&](const std::string& n) { return name.find(n) != std::string::npos; });
    if (relevant) {
      out.kept.push_back(r);
    } else if (similar) {
      out.excluded.push_back(r);
    } else {
      out.possible.push_back(r);
    }
  }
  return out;
}

ReviewDecisions load_review_decisions(const std::filesystem::path& path) {
  auto t = csv::read(path);
  const auto ic = t.column("repo_id");
  const auto dc = t.column("decision");
  ReviewDecisions out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto id = csv::to_int(t.rows[r][ic], t, r);
    const auto d = text::ascii_lower(t.rows[r][dc]);
    ReviewDecision v;
    if (d == "yes") {
      v = ReviewDecision::yes;
    } else if (d == "possible") {
      v = ReviewDecision::possible;
    } else if (d == "no") {
      v = ReviewDecision::no;
    } else {
      throw ParseError(t.source, t.line_numbers[r], fmt::format("unknown decision '{}'", t.rows[r][dc]));
    }
    if (!out.emplace(id, v).second) {
      throw ParseError(t.source, t.line_numbers[r], fmt::format("duplicate decision for repo {}", id));
    }
  }
  return out;
}

ReviewOutcome apply_review(std::span<const RepoRecord> possible, const ReviewDecisions& decisions) {
  ReviewOutcome out;
  for (const auto& r : possible) {
    auto it = decisions.find(r.repo_id);
    auto d = it == decisions.end() ? ReviewDecision::possible : it->second;
    switch (d) {
      case ReviewDecision::yes: out.accepted.push_back(r); break;
      case ReviewDecision::possible: out.possible.push_back(r); break;
      case ReviewDecision::no: out.rejected.push_back(r); break;
    }
  }
  return out;
}

}  // namespace hashecon::ghscan
