#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hashecon/common/error.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::testing {

using namespace hashecon::ghscan;

inline RepoRecord repo(std::int64_t id, std::string owner, std::string name, std::string created,
                       std::optional<std::string> description = std::nullopt, std::vector<std::string> topics = {}) {
  RepoRecord r;
  r.repo_id = id;
  r.owner = owner;
  r.full_name = owner + "/" + name;
  r.description = std::move(description);
  r.topics = std::move(topics);
  r.created_at = parse_date(created);
  r.matched_term = "argon2";
  return r;
}

/// In-memory search API: answers term + created-range queries with the API's paging and cap.
class MemorySource final : public SearchSource {
 public:
  explicit MemorySource(std::vector<RepoRecord> repos) : repos_(std::move(repos)) {
    std::sort(repos_.begin(), repos_.end(), [](const auto& a, const auto& b) { return a.repo_id < b.repo_id; });
  }

  RepoPage repositories(const SearchQuery& q, int page) override {
    ++calls_;
    RepoPage out;
    std::vector<RepoRecord> hits;
    for (const auto& r : repos_) {
      if (!q.created_range || q.created_range->contains(r.created_at)) hits.push_back(r);
    }
    out.total_count = hits.size();
    const std::size_t begin = static_cast<std::size_t>(page - 1) * kPerPage;
    const std::size_t end = std::min<std::size_t>({hits.size(), begin + kPerPage, kResultCap});
    for (std::size_t i = begin; i < end; ++i) out.items.push_back(hits[i]);
    return out;
  }

  CodePage code(const SearchQuery&, int page) override {
    ++calls_;
    CodePage out;
    out.total_count = code_ids.size();
    const std::size_t begin = static_cast<std::size_t>(page - 1) * kPerPage;
    const std::size_t end = std::min<std::size_t>({code_ids.size(), begin + kPerPage, kResultCap});
    for (std::size_t i = begin; i < end; ++i) out.items.push_back({code_ids[i], "o/r" + std::to_string(code_ids[i]), "a.c"});
    return out;
  }

  std::uint64_t api_calls() const override { return calls_; }
  const std::vector<RepoRecord>& all() const { return repos_; }

  std::vector<std::int64_t> code_ids;

 private:
  std::vector<RepoRecord> repos_;
  std::uint64_t calls_ = 0;
};

/// `n` repos spread over [first, last] by a seeded RNG, one owner per ten repos.
inline std::vector<RepoRecord> random_repos(std::size_t n, std::string first, std::string last, unsigned seed) {
  std::mt19937 rng(seed);
  const auto a = parse_date(first), b = parse_date(last);
  std::uniform_int_distribution<int> day(0, static_cast<int>((b - a).count()));
  std::vector<RepoRecord> v;
  for (std::size_t i = 0; i < n; ++i) {
    auto d = a + std::chrono::days(day(rng));
    v.push_back(repo(static_cast<std::int64_t>(1000 + i * 7), "owner" + std::to_string(i / 10), "r" + std::to_string(i),
                     format_date(d)));
  }
  return v;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hashecon_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace hashecon::testing
