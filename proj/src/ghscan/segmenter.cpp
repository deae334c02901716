#include <algorithm>

#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::ghscan {

namespace {

struct Collector {
  SearchSource& source;
  const SearchQuery& base;
  std::uint64_t cap;
  SegmentedResult out;

  void fetch_rest(const SearchQuery& q, const RepoPage& first, std::uint64_t limit) {
    append(first.items);
    std::uint64_t got = first.items.size();
    const std::uint64_t want = std::min({first.total_count, limit, kResultCap});
    for (int page = 2; got < want; ++page) {
      auto p = source.repositories(q, page);
      if (p.items.empty()) break;
      got += p.items.size();
      append(p.items);
    }
    if (got < std::min(first.total_count, kResultCap)) {
      out.warnings.push_back(fmt::format("{}: expected {} results, received {}", q.normalized(),
                                         std::min(first.total_count, kResultCap), got));
    }
    last_retrieved = got;
  }

  void append(const std::vector<RepoRecord>& items) { out.records.insert(out.records.end(), items.begin(), items.end()); }

  void run(DateRange range) {
    const auto q = base.with_range(range);
    auto first = source.repositories(q, 1);
    if (first.incomplete_results) out.warnings.push_back(fmt::format("{}: API reported incomplete results", q.normalized()));
    if (first.total_count < cap) {
      fetch_rest(q, first, first.total_count);
      out.segments.push_back({range, first.total_count});
      return;
    }
    if (range.days() <= 1) {
      fetch_rest(q, first, kResultCap);
      out.segments.push_back({range, first.total_count});
      out.truncations.push_back({range, first.total_count, last_retrieved});
      out.warnings.push_back(fmt::format("{}: {} hits in a single day, only {} retrievable", q.normalized(),
                                         first.total_count, last_retrieved));
      return;
    }
    const Date mid = range.from + std::chrono::days((range.days() - 1) / 2);
    run({range.from, mid});
    run({mid + std::chrono::days(1), range.to});
  }

  std::uint64_t last_retrieved = 0;
};

}  // namespace

SegmentedResult segmented_repo_search(SearchSource& source, const SearchQuery& query, std::uint64_t result_cap) {
  query.validate();
  if (!query.created_range) throw DomainError("segmented search needs a created range");
  if (result_cap < 1 || result_cap > kResultCap) throw DomainError(fmt::format("result cap must be in [1, {}]", kResultCap));
  const auto before = source.api_calls();
  Collector c{source, query, result_cap, {}};
  c.run(*query.created_range);
  auto& recs = c.out.records;
  std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.repo_id < b.repo_id; });
  recs.erase(std::unique(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.repo_id == b.repo_id; }),
             recs.end());
  c.out.api_calls = source.api_calls() - before;
  return std::move(c.out);
}

}  // namespace hashecon::ghscan
