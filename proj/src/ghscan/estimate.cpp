#include <cmath>
#include <unordered_set>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::ghscan {

CodeSearchEstimate estimate_unique_repos(std::uint64_t total_hits, std::span<const std::int64_t> first_page_repo_ids,
                                         std::uint64_t sample_size) {
  if (sample_size < 1) throw DomainError("sample size must be >= 1");
  CodeSearchEstimate e;
  e.total_hits = total_hits;
  if (total_hits == 0) {
    e.exact = true;
    return e;
  }
  if (first_page_repo_ids.empty()) throw DomainError("positive hit count with an empty sample");
  const auto take = std::min<std::uint64_t>(first_page_repo_ids.size(), sample_size);
  const std::unordered_set<std::int64_t> unique(first_page_repo_ids.begin(), first_page_repo_ids.begin() + take);
  e.sampled_unique_ids = unique.size();
  if (total_hits <= sample_size) {
    if (take < total_hits) {
      throw DomainError(fmt::format("exact count needs all {} hits, sample has {}", total_hits, take));
    }
    e.exact = true;
    e.sample_size = take;
    e.estimated_repos = unique.size();
    e.duplication_quota = 1.0 - static_cast<double>(unique.size()) / static_cast<double>(take);
    return e;
  }
  if (take < sample_size) {
    throw DomainError(fmt::format("sample has {} ids, {} required", take, sample_size));
  }
  e.sample_size = sample_size;
  e.duplication_quota = 1.0 - static_cast<double>(unique.size()) / static_cast<double>(sample_size);
  // Integer rounding of total * unique / sample, half up.
  using boost::multiprecision::uint128_t;
  const uint128_t num = uint128_t(total_hits) * unique.size() * 2 + sample_size;
  e.estimated_repos = static_cast<std::uint64_t>(num / (uint128_t(sample_size) * 2));
  return e;
}

std::uint64_t apply_retention_ratio(std::uint64_t estimate, double retention) {
  if (!(retention >= 0.0 && retention <= 1.0)) throw DomainError("retention must be in [0, 1]");
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(estimate) * retention));
}

CodeSearchEstimate sample_code_search(SearchSource& source, const SearchQuery& query, std::uint64_t sample_size) {
  query.validate();
  if (sample_size < 1 || sample_size > kResultCap) throw DomainError(fmt::format("sample size must be in [1, {}]", kResultCap));
  auto first = source.code(query, 1);
  std::vector<std::int64_t> ids;
  for (const auto& h : first.items) ids.push_back(h.repo_id);
  const std::uint64_t want = std::min(first.total_count, sample_size);
  for (int page = 2; ids.size() < want; ++page) {
    auto p = source.code(query, page);
    if (p.items.empty()) break;
    for (const auto& h : p.items) ids.push_back(h.repo_id);
  }
  if (ids.size() > sample_size) ids.resize(sample_size);
  return estimate_unique_repos(first.total_count, ids, sample_size);
}

}  // namespace hashecon::ghscan
