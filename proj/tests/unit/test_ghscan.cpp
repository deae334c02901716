#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ghscan_fakes.hpp"

using namespace hashecon;
using namespace hashecon::ghscan;
using hashecon::testing::fresh_dir;
using hashecon::testing::MemorySource;
using hashecon::testing::repo;

TEST(Query, DatesAndNormalization) {
  EXPECT_EQ(format_date(parse_date("2019-03-04T10:00:00Z")), "2019-03-04");
  EXPECT_EQ(year_of(parse_date("2024-12-31")), 2024);
  EXPECT_THROW(parse_date("2019-02-30"), DomainError);
  EXPECT_THROW(parse_date("20190304"), DomainError);

  SearchQuery q;
  q.term = "Argon2";
  q.created_range = DateRange{parse_date("2015-01-01"), parse_date("2015-06-30")};
  EXPECT_EQ(q.normalized(), "argon2 created:2015-01-01..2015-06-30");
  EXPECT_EQ(q.created_range->days(), 181);
  SearchQuery c;
  c.term = "key derivation";
  c.language = "C";
  c.negative_keywords = {"miner", "proof of work"};
  EXPECT_EQ(c.normalized(), "\"key derivation\" language:c NOT miner NOT \"proof of work\"");
  SearchQuery empty;
  EXPECT_THROW(empty.validate(), DomainError);
}

TEST(Records, JsonRoundTrip) {
  auto r = repo(42, "alice", "kdf", "2020-05-06", "password hashing", {"argon2", "crypto"});
  r.stars = 17;
  auto back = parse_repo_item(repo_item_json(r), "argon2");
  EXPECT_EQ(back.repo_id, 42);
  EXPECT_EQ(back.full_name, "alice/kdf");
  EXPECT_EQ(back.name(), "kdf");
  EXPECT_EQ(back.owner, "alice");
  EXPECT_EQ(back.description, r.description);
  EXPECT_EQ(back.topics, r.topics);
  EXPECT_EQ(back.stars, 17);
  EXPECT_EQ(back.created_at, r.created_at);
  CodeHit h{7, "bob/x", "src/a.c"};
  auto hb = parse_code_item(code_item_json(h));
  EXPECT_EQ(hb.repo_id, 7);
  EXPECT_EQ(hb.path, "src/a.c");
  EXPECT_THROW(parse_repo_item("{\"id\":1}", "x"), ParseError);
  EXPECT_THROW(parse_repo_item("not json", "x"), ParseError);
}

TEST(FixtureSource, CorpusRecordingsAndErrors) {
  auto dir = fresh_dir("fixture_source");
  EXPECT_THROW(FixtureSource{dir}, IoError);  // neither recorded/ nor corpus/
  EXPECT_THROW(FixtureSource{dir / "missing"}, IoError);

  std::filesystem::create_directories(dir / "corpus");
  {
    std::ofstream out(dir / "corpus" / "argon2.jsonl");
    for (int i = 0; i < 250; ++i) out << repo_item_json(repo(500 - i, "o", "r" + std::to_string(i), "2016-01-01")) << "\n";
    out << repo_item_json(repo(9999, "o", "late", "2023-01-01")) << "\n";
  }
  FixtureSource src(dir);
  SearchQuery q;
  q.term = "Argon2";
  q.created_range = DateRange{parse_date("2015-01-01"), parse_date("2020-12-31")};
  auto p1 = src.repositories(q, 1);
  EXPECT_EQ(p1.total_count, 250u);
  ASSERT_EQ(p1.items.size(), 100u);
  EXPECT_EQ(p1.items.front().repo_id, 251);  // ordered by id
  EXPECT_EQ(src.repositories(q, 3).items.size(), 50u);
  EXPECT_TRUE(src.repositories(q, 4).items.empty());
  EXPECT_EQ(src.ground_truth(q).size(), 250u);
  EXPECT_EQ(src.api_calls(), 3u);

  auto lang = q;
  lang.language = "c";
  EXPECT_THROW(src.repositories(lang, 1), IoError);
  EXPECT_THROW(src.code(q, 1), IoError);
  auto other = q;
  other.term = "bcrypt";
  EXPECT_THROW(src.repositories(other, 1), IoError);

  // A recorded page takes precedence over the corpus.
  RepoPage rec;
  rec.total_count = 1;
  rec.items.push_back(repo(1, "x", "y", "2016-02-02"));
  write_recorded_page(dir / recorded_page_path(Endpoint::repositories, q, 1), Endpoint::repositories, q, 1, rec);
  auto again = src.repositories(q, 1);
  EXPECT_EQ(again.total_count, 1u);
  EXPECT_EQ(again.items.at(0).repo_id, 1);
}

TEST(CachingSource, RecordsAndReplays) {
  auto dir = fresh_dir("caching");
  MemorySource upstream({repo(1, "a", "x", "2016-01-01"), repo(2, "b", "y", "2017-01-01")});
  upstream.code_ids = {5, 5, 6};
  SearchQuery q;
  q.term = "argon2";
  q.created_range = DateRange{parse_date("2015-01-01"), parse_date("2020-12-31")};
  {
    CachingSource cache(upstream, dir);
    EXPECT_EQ(cache.repositories(q, 1).items.size(), 2u);
    EXPECT_EQ(cache.repositories(q, 1).items.size(), 2u);
    EXPECT_EQ(cache.code(q, 1).items.size(), 3u);
    EXPECT_EQ(cache.upstream_calls(), 2u);
    EXPECT_EQ(cache.api_calls(), 3u);
  }
  // The recordings alone now answer the same queries offline.
  FixtureSource replay(dir);
  auto p = replay.repositories(q, 1);
  EXPECT_EQ(p.total_count, 2u);
  EXPECT_EQ(p.items.at(1).full_name, "b/y");
  EXPECT_EQ(replay.code(q, 1).items.at(2).repo_id, 6);
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    EXPECT_EQ(e.path().extension() == ".tmp", false) << e.path();
  }
}

TEST(Filters, SpamThresholdAndAllowlist) {
  std::vector<RepoRecord> v;
  for (int i = 0; i < 66; ++i) v.push_back(repo(i, "Spammer", "s" + std::to_string(i), "2020-01-01"));
  for (int i = 0; i < 65; ++i) v.push_back(repo(100 + i, "busy", "b" + std::to_string(i), "2020-01-01"));
  v.push_back(repo(999, "solo", "one", "2020-01-01"));
  auto r = filter_spam(v);
  EXPECT_EQ(r.removed, 66u);
  EXPECT_EQ(r.records.size(), 66u);
  auto allowed = filter_spam(v, 66, {"spammer"});
  EXPECT_EQ(allowed.removed, 0u);
  EXPECT_EQ(filter_spam(r.records).records.size(), r.records.size());  // idempotent
}

TEST(Filters, KeywordMatching) {
  KeywordMatcher m(std::vector<std::string>{"miner", "mint", "coin", "proof of work", "wallet"});
  EXPECT_TRUE(m.matches("fast bitcoin miner"));
  EXPECT_FALSE(m.matches("password hashing library"));
  EXPECT_TRUE(m.matches("Mint-based token"));
  EXPECT_FALSE(m.matches("mintage of the year"));
  EXPECT_FALSE(m.matches("bitcoin explorer"));  // "coin" is a bounded short word
  EXPECT_TRUE(m.matches("a Proof Of Work demo"));
  KeywordMatcher loose(std::vector<std::string>{"coin"}, 0);
  EXPECT_TRUE(loose.matches("bitcoin explorer"));

  std::vector<RepoRecord> v{repo(1, "a", "wallet-app", "2020-01-01"), repo(2, "a", "kdf", "2020-01-01", "salted hashes"),
                            repo(3, "a", "tool", "2020-01-01", std::nullopt, {"mint"})};
  auto r = filter_keywords(v, m);
  EXPECT_EQ(r.removed, 2u);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].repo_id, 2);
  EXPECT_EQ(filter_keywords(r.records, m).records.size(), 1u);
}

TEST(Filters, RelevanceSplitAndReview) {
  KeywordMatcher words(std::vector<std::string>{"key derivation", "password", "hash"}, 0);
  std::vector<std::string> similar{"inscryption", "scryptic"};
  std::vector<RepoRecord> v{repo(1, "a", "inscryption-mod", "2020-01-01", "a card game mod"),
                            repo(2, "a", "node-kdf", "2020-01-01", "key derivation in js"),
                            repo(3, "a", "stuff", "2020-01-01", "misc"),
                            repo(4, "a", "inscryption-hash", "2020-01-01")};
  auto split = relevance_filter(v, words, similar);
  ASSERT_EQ(split.excluded.size(), 1u);
  EXPECT_EQ(split.excluded[0].repo_id, 1);
  ASSERT_EQ(split.kept.size(), 2u);
  ASSERT_EQ(split.possible.size(), 1u);
  EXPECT_EQ(split.possible[0].repo_id, 3);
  auto twice = relevance_filter(split.kept, words, similar);
  EXPECT_EQ(twice.kept.size(), split.kept.size());

  auto dir = fresh_dir("reviews");
  std::ofstream(dir / "r.csv") << "repo_id,decision\n3,no\n7,yes\n";
  auto decisions = load_review_decisions(dir / "r.csv");
  auto outcome = apply_review(split.possible, decisions);
  EXPECT_EQ(outcome.rejected.size(), 1u);
  EXPECT_TRUE(outcome.possible.empty());
  EXPECT_TRUE(apply_review(split.possible, {}).possible.size() == 1);
  std::ofstream(dir / "bad.csv") << "repo_id,decision\n3,no\n3,yes\n";
  EXPECT_THROW(load_review_decisions(dir / "bad.csv"), ParseError);
  std::ofstream(dir / "bad2.csv") << "repo_id,decision\n3,maybe\n";
  EXPECT_THROW(load_review_decisions(dir / "bad2.csv"), ParseError);
}

TEST(Estimate, QuotaAndExactPaths) {
  auto ids = [](std::size_t n, std::size_t unique) {
    std::vector<std::int64_t> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<std::int64_t>(i % unique));
    return v;
  };
  auto a = estimate_unique_repos(48768, ids(1000, 941));
  EXPECT_EQ(a.estimated_repos, 45891u);
  EXPECT_NEAR(a.duplication_quota, 0.059, 1e-12);
  EXPECT_FALSE(a.exact);
  EXPECT_EQ(estimate_unique_repos(3232, ids(1000, 327)).estimated_repos, 1057u);
  auto small = estimate_unique_repos(500, ids(500, 400));
  EXPECT_TRUE(small.exact);
  EXPECT_EQ(small.estimated_repos, 400u);
  // At total == sample both paths count the same ids.
  auto at_cap = estimate_unique_repos(1000, ids(1000, 730));
  EXPECT_EQ(at_cap.estimated_repos, 730u);
  EXPECT_EQ(estimate_unique_repos(0, {}).estimated_repos, 0u);
  EXPECT_THROW(estimate_unique_repos(10, {}), DomainError);

  EXPECT_EQ(apply_retention_ratio(64416, 0.452), 29116u);
  EXPECT_EQ(apply_retention_ratio(96920, 0.452), 43808u);
  EXPECT_EQ(apply_retention_ratio(12345, 1.0), 12345u);
  EXPECT_THROW(apply_retention_ratio(1, 1.5), DomainError);
}

TEST(Estimate, SamplesCodeSearch) {
  MemorySource src({});
  for (int i = 0; i < 5000; ++i) src.code_ids.push_back(i % 800);
  SearchQuery q;
  q.term = "argon2";
  auto e = sample_code_search(src, q);
  EXPECT_EQ(e.total_hits, 5000u);
  EXPECT_EQ(e.sampled_unique_ids, 800u);
  EXPECT_EQ(e.estimated_repos, 4000u);
  EXPECT_EQ(src.api_calls(), 10u);
}

TEST(Report, LedgerIdentityAndYears) {
  std::vector<RepoRecord> v;
  for (int i = 0; i < 70; ++i) v.push_back(repo(i, "spam", "s" + std::to_string(i), "2018-03-01"));
  v.push_back(repo(100, "a", "coin-wallet", "2019-01-01"));
  v.push_back(repo(101, "a", "kdf", "2019-01-01"));
  v.push_back(repo(102, "b", "hasher", "2021-06-01"));
  MemorySource src(v);
  RepoScanSettings s;
  s.range = DateRange{parse_date("2015-01-01"), parse_date("2024-12-31")};
  s.exclusions = std::make_shared<KeywordMatcher>(std::vector<std::string>{"wallet"});
  auto t = scan_term(src, "Argon2", s);
  EXPECT_EQ(t.ledger.initial, 73u);
  EXPECT_EQ(t.ledger.spam_removed, 70u);
  EXPECT_EQ(t.ledger.mining_filtered, 1u);
  EXPECT_EQ(t.ledger.final_count, 2u);
  EXPECT_EQ(t.per_year.at(2019), 1u);
  EXPECT_EQ(t.per_year.at(2021), 1u);
  ScanReport report{{t}, {}};
  EXPECT_NO_THROW(report.check());
  std::ostringstream ledger, years;
  write_ledger_csv(ledger, report);
  EXPECT_EQ(ledger.str(),
            "algorithm,initial,spam_removed,spam_pct,mining_filtered,mining_pct,final,possible\n"
            "Argon2,73,70,95.89,1,1.37,2,0\n");
  write_years_csv(years, report);
  EXPECT_EQ(years.str(), "algorithm,year,count\nArgon2,2019,1\nArgon2,2020,0\nArgon2,2021,1\n");

  auto broken = report;
  broken.terms[0].ledger.final_count = 3;
  EXPECT_THROW(broken.check(), InternalError);
  auto bad_years = report;
  bad_years.terms[0].per_year[2030] = 5;
  EXPECT_THROW(bad_years.check(), InternalError);
}

TEST(Report, EmptyPipelineIsZeroed) {
  MemorySource src({});
  RepoScanSettings s;
  s.range = DateRange{parse_date("2015-01-01"), parse_date("2024-12-31")};
  auto t = scan_term(src, "yescrypt", s);
  EXPECT_EQ(t.ledger.initial, 0u);
  EXPECT_EQ(t.ledger.final_count, 0u);
  EXPECT_TRUE(t.per_year.empty());
  EXPECT_EQ(src.api_calls(), 1u);
  EXPECT_NO_THROW((ScanReport{{t}, {}}.check()));
}
