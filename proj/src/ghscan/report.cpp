#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::ghscan {

void FilterLedger::check() const {
  if (spam_removed > initial || mining_filtered > initial - spam_removed ||
      final_count != initial - spam_removed - mining_filtered || possible > final_count) {
    throw InternalError(fmt::format("inconsistent filter ledger: initial {} spam {} mining {} final {} possible {}",
                                    initial, spam_removed, mining_filtered, final_count, possible));
  }
}

std::uint64_t CodeRow::adjusted_repos() const {
  return retention ? apply_retention_ratio(estimate.estimated_repos, *retention) : estimate.estimated_repos;
}

void ScanReport::check() const {
  for (const auto& t : terms) {
    t.ledger.check();
    std::uint64_t sum = 0;
    for (const auto& [year, n] : t.per_year) sum += n;
    if (sum != t.ledger.final_count || t.final_records.size() != t.ledger.final_count) {
      throw InternalError(fmt::format("{}: per-year counts sum to {}, ledger final is {}", t.term, sum, t.ledger.final_count));
    }
  }
}

namespace {

void by_id(std::vector<RepoRecord>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.repo_id < b.repo_id; });
}

void append(std::vector<RepoRecord>& to, const std::vector<RepoRecord>& from) { to.insert(to.end(), from.begin(), from.end()); }

}  // namespace

TermReport scan_term(SearchSource& source, const std::string& term, const RepoScanSettings& settings) {
  SearchQuery q;
  q.term = term;
  q.created_range = settings.range;
  auto seg = segmented_repo_search(source, q, settings.result_cap);

  TermReport rep;
  rep.term = term;
  rep.truncations = seg.truncations;
  rep.api_calls = seg.api_calls;
  rep.ledger.initial = seg.records.size();

  auto spam = filter_spam(seg.records, settings.spam_threshold, settings.spam_allowlist);
  rep.ledger.spam_removed = spam.removed;

  auto kw = settings.exclusions ? filter_keywords(spam.records, *settings.exclusions) : FilterResult{spam.records, 0};
  rep.ledger.mining_filtered = kw.removed;

  const auto lower = text::ascii_lower(term);
  bool relevance = false;
  for (const auto& t : settings.relevance_terms) relevance |= text::ascii_lower(t) == lower;
  if (relevance) {
    if (!settings.relevancy_words) throw DomainError("relevance stage needs a relevancy word list");
    auto split = relevance_filter(kw.records, *settings.relevancy_words, settings.similar_names);
    ReviewDecisions none;
    const ReviewDecisions* decisions = &none;
    for (const auto& [t, d] : settings.review_decisions) {
      if (text::ascii_lower(t) == lower) decisions = &d;
    }
    auto review = apply_review(split.possible, *decisions);
    rep.ledger.mining_filtered += split.excluded.size() + review.rejected.size();
    append(rep.final_records, split.kept);
    append(rep.final_records, review.accepted);
    append(rep.final_records, review.possible);
    rep.possible_records = std::move(review.possible);
    by_id(rep.possible_records);
  } else {
    rep.final_records = std::move(kw.records);
  }
  by_id(rep.final_records);
  rep.ledger.final_count = rep.final_records.size();
  rep.ledger.possible = rep.possible_records.size();
  for (const auto& r : rep.final_records) ++rep.per_year[year_of(r.created_at)];
  rep.ledger.check();
  return rep;
}

namespace {

std::string pct(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? "0.00" : fmt::format("{:.2f}", 100.0 * static_cast<double>(part) / static_cast<double>(whole));
}

}  // namespace

void write_ledger_csv(std::ostream& out, const ScanReport& report) {
  report.check();
  out << "algorithm,initial,spam_removed,spam_pct,mining_filtered,mining_pct,final,possible\n";
  for (const auto& t : report.terms) {
    const auto& l = t.ledger;
    out << csv::escape(t.term) << ',' << l.initial << ',' << l.spam_removed << ',' << pct(l.spam_removed, l.initial)
        << ',' << l.mining_filtered << ',' << pct(l.mining_filtered, l.initial) << ',' << l.final_count << ','
        << l.possible << '\n';
  }
}

void write_years_csv(std::ostream& out, const ScanReport& report) {
  report.check();
  out << "algorithm,year,count\n";
  for (const auto& t : report.terms) {
    if (t.per_year.empty()) continue;
    for (int y = t.per_year.begin()->first; y <= t.per_year.rbegin()->first; ++y) {
      auto it = t.per_year.find(y);
      out << csv::escape(t.term) << ',' << y << ',' << (it == t.per_year.end() ? 0 : it->second) << '\n';
    }
  }
}

void write_code_csv(std::ostream& out, const ScanReport& report) {
  out << "algorithm,search,language,total_hits,sampled,unique_ids,duplication_quota,estimated_repos,adjusted_repos\n";
  for (const auto& c : report.code) {
    const auto& e = c.estimate;
    out << csv::escape(c.term) << ',' << csv::escape(c.search) << ',' << csv::escape(c.language.value_or("")) << ','
        << e.total_hits << ',' << e.sample_size << ',' << e.sampled_unique_ids << ','
        << fmt::format("{:.4f}", e.duplication_quota) << ',' << e.estimated_repos << ',' << c.adjusted_repos() << '\n';
  }
}

void write_possible_csv(std::ostream& out, const ScanReport& report) {
  out << "algorithm,repo_id,full_name,created_at,description\n";
  for (const auto& t : report.terms) {
    for (const auto& r : t.possible_records) {
      out << csv::escape(t.term) << ',' << r.repo_id << ',' << csv::escape(r.full_name) << ','
          << format_date(r.created_at) << ',' << csv::escape(r.description.value_or("")) << '\n';
    }
  }
}

}  // namespace hashecon::ghscan
