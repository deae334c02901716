#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hashecon::ghscan {

using Date = std::chrono::sys_days;

/// Accepts `YYYY-MM-DD` and ISO timestamps such as `2019-03-04T10:00:00Z`.
Date parse_date(std::string_view text);
std::string format_date(Date d);
int year_of(Date d);

struct DateRange {
  Date from;
  Date to;  // inclusive

  std::int64_t days() const { return (to - from).count() + 1; }
  bool contains(Date d) const { return d >= from && d <= to; }
  bool operator==(const DateRange&) const = default;
};

struct RepoRecord {
  std::int64_t repo_id = 0;
  std::string full_name;
  std::string owner;
  std::optional<std::string> description;
  std::vector<std::string> topics;
  std::int64_t stars = 0;
  Date created_at{};
  std::string matched_term;

  /// The part of full_name after the owner.
  std::string_view name() const;
};

struct CodeHit {
  std::int64_t repo_id = 0;
  std::string repo_full_name;
  std::string path;
};

struct SearchQuery {
  std::string term;
  std::optional<DateRange> created_range;
  std::optional<std::string> language;
  std::vector<std::string> negative_keywords;
  std::vector<std::string> path_excludes;
  std::vector<std::string> extension_excludes;

  void validate() const;
  /// Canonical search string; also the cache key.
  std::string normalized() const;
  SearchQuery with_range(DateRange r) const;
};

enum class Endpoint { repositories, code };
std::string_view to_string(Endpoint e);

inline constexpr int kPerPage = 100;
inline constexpr std::uint64_t kResultCap = 1000;

struct RepoPage {
  std::uint64_t total_count = 0;
  bool incomplete_results = false;
  std::vector<RepoRecord> items;
};

struct CodePage {
  std::uint64_t total_count = 0;
  bool incomplete_results = false;
  std::vector<CodeHit> items;
};

/// One page of search results. `page` is 1-based; pages beyond the result cap are empty.
class SearchSource {
 public:
  virtual ~SearchSource() = default;
  virtual RepoPage repositories(const SearchQuery& query, int page) = 0;
  virtual CodePage code(const SearchQuery& query, int page) = 0;
  /// Requests answered so far, including ones answered from a cache.
  virtual std::uint64_t api_calls() const = 0;
};

// Record files: newline-delimited JSON. The first line is a manifest
// {"kind":"manifest","endpoint":..,"query":..,"page":..,"total_count":..,"incomplete_results":..}
// and each following line is one item in the API's own JSON shape.

RepoRecord parse_repo_item(std::string_view json_line, std::string_view matched_term);
CodeHit parse_code_item(std::string_view json_line);
std::string repo_item_json(const RepoRecord& r);
std::string code_item_json(const CodeHit& h);

/// Relative path of a recorded page inside a fixture or cache directory.
std::filesystem::path recorded_page_path(Endpoint e, const SearchQuery& query, int page);

/// Offline source. Recorded pages under `dir/recorded/` are served first; repository
/// queries without a recording are answered from ground-truth corpora in
/// `dir/corpus/<term>.jsonl` (filtered by creation date, ordered by repo_id).
/// Anything else raises IoError.
class FixtureSource final : public SearchSource {
 public:
  explicit FixtureSource(std::filesystem::path dir);

  RepoPage repositories(const SearchQuery& query, int page) override;
  CodePage code(const SearchQuery& query, int page) override;
  std::uint64_t api_calls() const override;

  /// Every repo of `term` in the ground-truth corpus, unsegmented.
  std::vector<RepoRecord> ground_truth(const SearchQuery& query);

 private:
  const std::vector<RepoRecord>& corpus(const std::string& term);

  std::filesystem::path dir_;
  std::map<std::string, std::vector<RepoRecord>> corpora_;
  mutable std::mutex mu_;
  std::uint64_t calls_ = 0;
};

/// Writes every page fetched from `upstream` to `dir/recorded/` and answers repeats
/// from there. Writes go through a temp file and rename, so readers never see partial pages.
class CachingSource final : public SearchSource {
 public:
  CachingSource(SearchSource& upstream, std::filesystem::path dir);

  RepoPage repositories(const SearchQuery& query, int page) override;
  CodePage code(const SearchQuery& query, int page) override;
  std::uint64_t api_calls() const override;
  std::uint64_t upstream_calls() const { return upstream_.api_calls(); }

 private:
  SearchSource& upstream_;
  std::filesystem::path dir_;
  std::mutex write_mu_;
  std::uint64_t hits_ = 0;
  mutable std::mutex mu_;
};

void write_recorded_page(const std::filesystem::path& file, Endpoint e, const SearchQuery& query, int page,
                         const RepoPage& data);
void write_recorded_page(const std::filesystem::path& file, Endpoint e, const SearchQuery& query, int page,
                         const CodePage& data);

using Clock = std::chrono::steady_clock;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Thread-safe token bucket. `acquire` blocks through the sleeper until a token is free.
class TokenBucket {
 public:
  TokenBucket(double capacity, double refill_per_second, Sleeper sleeper = {},
              std::function<Clock::time_point()> now = {});
  void acquire();
  double available();

 private:
  void refill_locked();

  double capacity_;
  double rate_;
  double tokens_;
  Sleeper sleeper_;
  std::function<Clock::time_point()> now_;
  Clock::time_point last_;
  std::mutex mu_;
};

struct LiveOptions {
  std::string base_url = "https://api.github.com";
  std::string token;  // empty: taken from GITHUB_TOKEN
  double requests_per_minute = 30;  // authenticated search limit
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{60000};
  std::chrono::seconds timeout{30};
  Sleeper sleeper;  // default: std::this_thread::sleep_for
};

/// REST client for the search endpoints. Retries 403/429/5xx with exponential backoff,
/// honoring Retry-After and X-RateLimit-Reset; RateLimitError carries a resume token
/// (`endpoint page query`) once retries are exhausted.
class LiveClient final : public SearchSource {
 public:
  explicit LiveClient(LiveOptions options);
  ~LiveClient() override;

  RepoPage repositories(const SearchQuery& query, int page) override;
  CodePage code(const SearchQuery& query, int page) override;
  std::uint64_t api_calls() const override;

 private:
  std::string get(Endpoint e, const SearchQuery& query, int page);

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Segment {
  DateRange range;
  std::uint64_t total_count = 0;
};

struct Truncation {
  DateRange range;
  std::uint64_t total_count = 0;
  std::uint64_t retrieved = 0;
};

struct SegmentedResult {
  std::vector<RepoRecord> records;  // unique by repo_id, ascending
  std::vector<Segment> segments;    // leaves that were fetched, in date order
  std::vector<Truncation> truncations;
  std::vector<std::string> warnings;
  std::uint64_t api_calls = 0;
};

/// Bisects the creation range at its midpoint day until each segment reports fewer than
/// `result_cap` hits; single-day segments at or over the cap are fetched as far as the
/// API allows and recorded as truncated. The query must carry a created_range.
SegmentedResult segmented_repo_search(SearchSource& source, const SearchQuery& query,
                                      std::uint64_t result_cap = kResultCap);

struct FilterResult {
  std::vector<RepoRecord> records;
  std::uint64_t removed = 0;
};

/// Drops every repo of owners with at least `per_user_threshold` repos, unless allowlisted.
FilterResult filter_spam(std::span<const RepoRecord> records, std::uint64_t per_user_threshold = 66,
                         const std::set<std::string>& allowlist = {});

/// Case-insensitive keyword matcher. Multiword or long terms match as substrings;
/// single words of at most `short_word_length` letters match on word boundaries
/// (set it to 0 for pure substring matching).
class KeywordMatcher {
 public:
  explicit KeywordMatcher(std::vector<std::string> keywords, std::size_t short_word_length = 4);
  static KeywordMatcher load(const std::filesystem::path& path, std::size_t short_word_length = 4);

  bool matches(std::string_view text) const;
  /// Repo name, description and topics.
  bool matches(const RepoRecord& r) const;
  std::span<const std::string> keywords() const noexcept { return keywords_; }

 private:
  std::vector<std::string> keywords_;
  std::vector<bool> bounded_;
};

FilterResult filter_keywords(std::span<const RepoRecord> records, const KeywordMatcher& exclusions);

struct RelevanceSplit {
  std::vector<RepoRecord> kept;
  std::vector<RepoRecord> possible;
  std::vector<RepoRecord> excluded;
};

/// excluded: the repo name contains a similar name and no relevancy word appears;
/// kept: a relevancy word appears; possible: everything else (needs review).
RelevanceSplit relevance_filter(std::span<const RepoRecord> records, const KeywordMatcher& relevancy_words,
                                std::span<const std::string> similar_names);

enum class ReviewDecision { yes, possible, no };
using ReviewDecisions = std::map<std::int64_t, ReviewDecision>;
/// CSV `repo_id,decision` with decision in yes|possible|no.
ReviewDecisions load_review_decisions(const std::filesystem::path& path);

struct ReviewOutcome {
  std::vector<RepoRecord> accepted;  // yes
  std::vector<RepoRecord> possible;  // still undecided, kept in the final count
  std::vector<RepoRecord> rejected;  // no
};
/// Repos without a recorded decision stay possible.
ReviewOutcome apply_review(std::span<const RepoRecord> possible, const ReviewDecisions& decisions);

struct CodeSearchEstimate {
  std::uint64_t total_hits = 0;
  std::uint64_t sample_size = 0;
  std::uint64_t sampled_unique_ids = 0;
  double duplication_quota = 0;
  std::uint64_t estimated_repos = 0;
  bool exact = false;
};

/// quota = 1 - unique / sample_size; estimate = round(total_hits * unique / sample_size).
/// When total_hits <= sample_size the distinct ids are counted directly.
CodeSearchEstimate estimate_unique_repos(std::uint64_t total_hits, std::span<const std::int64_t> first_page_repo_ids,
                                         std::uint64_t sample_size = kResultCap);

/// round(estimate * retention), half away from zero.
std::uint64_t apply_retention_ratio(std::uint64_t estimate, double retention);

/// Pages through the first `sample_size` code hits and estimates unique repositories.
CodeSearchEstimate sample_code_search(SearchSource& source, const SearchQuery& query,
                                      std::uint64_t sample_size = kResultCap);

struct FilterLedger {
  std::uint64_t initial = 0;
  std::uint64_t spam_removed = 0;
  std::uint64_t mining_filtered = 0;  // keyword, similar-name and review removals
  std::uint64_t final_count = 0;
  std::uint64_t possible = 0;  // part of final_count still awaiting review

  /// Throws InternalError unless final = initial - spam - mining.
  void check() const;
};

struct TermReport {
  std::string term;
  FilterLedger ledger;
  std::map<int, std::uint64_t> per_year;  // created_at year of the final repos
  std::vector<RepoRecord> final_records;
  std::vector<RepoRecord> possible_records;
  std::vector<Truncation> truncations;
  std::uint64_t api_calls = 0;
};

struct CodeRow {
  std::string term;
  std::string search;  // "simple" or the language
  std::optional<std::string> language;
  CodeSearchEstimate estimate;
  std::optional<double> retention;
  std::uint64_t adjusted_repos() const;
};

struct ScanReport {
  std::vector<TermReport> terms;
  std::vector<CodeRow> code;

  /// Checks every ledger and the per-year accounting identity.
  void check() const;
};

struct RepoScanSettings {
  DateRange range;
  std::uint64_t result_cap = kResultCap;
  std::uint64_t spam_threshold = 66;
  std::set<std::string> spam_allowlist;
  std::shared_ptr<const KeywordMatcher> exclusions;
  /// Terms run through the relevance stage, with its word lists and recorded decisions.
  std::set<std::string> relevance_terms;
  std::shared_ptr<const KeywordMatcher> relevancy_words;
  std::vector<std::string> similar_names;
  std::map<std::string, ReviewDecisions> review_decisions;
};

TermReport scan_term(SearchSource& source, const std::string& term, const RepoScanSettings& settings);

/// Table-1 style ledger: algorithm,initial,spam_removed,spam_pct,mining_filtered,mining_pct,final,possible
/// with percentages of the initial count to two decimals.
void write_ledger_csv(std::ostream& out, const ScanReport& report);
/// algorithm,year,count for every year between the first and last seen (zeros included).
void write_years_csv(std::ostream& out, const ScanReport& report);
void write_code_csv(std::ostream& out, const ScanReport& report);
/// repo_id,full_name,created_at,description for manual review.
void write_possible_csv(std::ostream& out, const ScanReport& report);

}  // namespace hashecon::ghscan
