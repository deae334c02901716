#include <algorithm>

#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/ghscan.hpp"
#include "records_io.hpp"

namespace hashecon::ghscan {

namespace {

template <class T>
std::vector<T> page_slice(const std::vector<T>& all, int page) {
  if (page < 1) throw DomainError("page numbers start at 1");
  const std::uint64_t begin = static_cast<std::uint64_t>(page - 1) * kPerPage;
  if (begin >= kResultCap || begin >= all.size()) return {};
  const std::uint64_t end = std::min<std::uint64_t>({begin + kPerPage, all.size(), kResultCap});
  return {all.begin() + static_cast<std::ptrdiff_t>(begin), all.begin() + static_cast<std::ptrdiff_t>(end)};
}

}  // namespace

FixtureSource::FixtureSource(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw IoError(fmt::format("fixture directory {} not found", dir_.string()));
  if (!std::filesystem::exists(dir_ / "recorded") && !std::filesystem::exists(dir_ / "corpus")) {
    throw IoError(fmt::format("fixture directory {} has neither recorded/ nor corpus/", dir_.string()));
  }
}

const std::vector<RepoRecord>& FixtureSource::corpus(const std::string& term) {
  const std::string key = text::ascii_lower(term);
  auto it = corpora_.find(key);
  if (it != corpora_.end()) return it->second;
  const auto file = dir_ / "corpus" / (key + ".jsonl");
  if (!std::filesystem::exists(file)) {
    throw IoError(fmt::format("no recorded page and no corpus {} for term '{}'", file.string(), term));
  }
  auto records = detail::read_corpus(file, term);
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.repo_id < b.repo_id; });
  return corpora_.emplace(key, std::move(records)).first->second;
}

std::vector<RepoRecord> FixtureSource::ground_truth(const SearchQuery& query) {
  query.validate();
  if (query.language || !query.negative_keywords.empty() || !query.path_excludes.empty() ||
      !query.extension_excludes.empty()) {
    throw IoError(fmt::format("corpus fixtures answer term and date queries only, not '{}'", query.normalized()));
  }
  std::lock_guard lock(mu_);
  std::vector<RepoRecord> out;
  for (const auto& r : corpus(query.term)) {
    if (!query.created_range || query.created_range->contains(r.created_at)) out.push_back(r);
  }
  return out;
}

RepoPage FixtureSource::repositories(const SearchQuery& query, int page) {
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  if (auto rec = detail::read_repo_page(dir_ / recorded_page_path(Endpoint::repositories, query, page), query, page)) {
    return *rec;
  }
  auto all = ground_truth(query);
  RepoPage p;
  p.total_count = all.size();
  p.items = page_slice(all, page);
  return p;
}

CodePage FixtureSource::code(const SearchQuery& query, int page) {
  {
    std::lock_guard lock(mu_);
    ++calls_;
  }
  const auto file = dir_ / recorded_page_path(Endpoint::code, query, page);
  if (auto rec = detail::read_code_page(file, query, page)) return *rec;
  throw IoError(fmt::format("no recorded code-search page {} for '{}' ({})", page, query.normalized(), file.string()));
}

std::uint64_t FixtureSource::api_calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace hashecon::ghscan
