#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/ghscan.hpp"

namespace hashecon::cli {

namespace {

struct ScanArgs {
  bool live = false;
  std::string fixtures, record, terms, from, to, mode, languages, languages_file, exclusions, relevancy,
      similar, reviews, allowlist, spam_threshold, relevance_terms, base_url, retries;
  std::map<std::string, CLI::Option*> opt;
};

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError(fmt::format("cannot open {}", p.string()));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty() && t[0] != '#') out.push_back(t);
  }
  return out;
}

}  // namespace

Action register_scan(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("scan", "Repository and code search with filtering and unique-repo estimates");
  auto a = std::make_shared<ScanArgs>();
  auto& o = a->opt;
  o["live"] = sub->add_flag("--live", a->live, "query the live search API (needs GITHUB_TOKEN)");
  o["fixtures"] = sub->add_option("--fixtures", a->fixtures, "offline fixture directory");
  o["record"] = sub->add_option("--record", a->record, "write every fetched page to this directory");
  o["terms"] = sub->add_option("--term", a->terms, "comma list of search terms");
  o["from"] = sub->add_option("--from", a->from, "first creation date (YYYY-MM-DD)");
  o["to"] = sub->add_option("--to", a->to, "last creation date (YYYY-MM-DD)");
  o["mode"] = sub->add_option("--mode", a->mode, "repos | code | both");
  o["languages"] = sub->add_option("--languages", a->languages, "comma list of languages for code search");
  o["languages_file"] = sub->add_option("--languages-file", a->languages_file, "one language per line");
  o["exclusions"] = sub->add_option("--exclusions", a->exclusions, "exclusion keyword list");
  o["relevancy_words"] = sub->add_option("--relevancy-words", a->relevancy, "relevancy word list");
  o["similar_names"] = sub->add_option("--similar-names", a->similar, "similar-name list");
  o["reviews"] = sub->add_option("--reviews", a->reviews, "directory with <term>.csv review decisions");
  o["spam_allowlist"] = sub->add_option("--allowlist", a->allowlist, "comma list of owners exempt from the spam filter");
  o["spam_threshold"] = sub->add_option("--spam-threshold", a->spam_threshold, "repos per owner counted as spam (default 66)");
  o["relevance_terms"] = sub->add_option("--relevance-terms", a->relevance_terms, "terms that go through the relevance stage");
  o["base_url"] = sub->add_option("--base-url", a->base_url, "API base URL for --live");
  o["retries"] = sub->add_option("--retries", a->retries, "retries per request for --live (default 5)");
  sub->get_option("--live")->excludes(sub->get_option("--fixtures"));

  return [a, &ctx] {
    auto s = [&](const std::string& key, const std::string& value, const std::string& fallback) {
      return ctx.setting(key, given(a->opt[key]), value, fallback);
    };
    auto p = [&](const std::string& key, const std::string& value, const std::string& fallback) {
      return ctx.path_setting(key, given(a->opt[key]), value, fallback);
    };
    const bool live = s("live", a->live ? "true" : "false", "false") == "true";
    const auto fixtures = p("fixtures", a->fixtures, "");
    if (live == !fixtures.empty()) throw UsageError("scan needs exactly one of --live or --fixtures DIR");
    const auto terms = split_list(s("terms", a->terms, ""));
    if (terms.empty()) throw UsageError("scan needs at least one --term");
    const auto mode = s("mode", a->mode, "repos");
    if (mode != "repos" && mode != "code" && mode != "both") throw UsageError("--mode must be repos, code or both");

    std::unique_ptr<ghscan::SearchSource> base;
    if (live) {
      ghscan::LiveOptions lo;
      lo.base_url = s("base_url", a->base_url, lo.base_url);
      const double retries = number("retries", s("retries", a->retries, std::to_string(lo.max_retries)));
      if (retries < 0 || retries != static_cast<int>(retries)) throw UsageError("--retries must be a whole number >= 0");
      lo.max_retries = static_cast<int>(retries);
      if (!std::getenv("GITHUB_TOKEN")) ctx.log("warning: GITHUB_TOKEN is not set; search limits are much lower");
      base = std::make_unique<ghscan::LiveClient>(lo);
    } else {
      base = std::make_unique<ghscan::FixtureSource>(fixtures);
    }
    std::unique_ptr<ghscan::CachingSource> cache;
    ghscan::SearchSource* source = base.get();
    if (const auto rec = p("record", a->record, ""); !rec.empty()) {
      cache = std::make_unique<ghscan::CachingSource>(*base, rec);
      source = cache.get();
    }

    const auto excl_path = p("exclusions", a->exclusions, ctx.data_file("exclusions.txt").string());
    ctx.cfg.track_file(excl_path);
    auto exclusions = std::make_shared<const ghscan::KeywordMatcher>(ghscan::KeywordMatcher::load(excl_path));

    ghscan::ScanReport report;
    if (mode != "code") {
      ghscan::RepoScanSettings rs;
      rs.range = {ghscan::parse_date(s("from", a->from, "2008-01-01")), ghscan::parse_date(s("to", a->to, "2024-12-31"))};
      rs.spam_threshold = static_cast<std::uint64_t>(number("spam_threshold", s("spam_threshold", a->spam_threshold, "66")));
      for (const auto& owner : split_list(s("spam_allowlist", a->allowlist, ""))) rs.spam_allowlist.insert(owner);
      rs.exclusions = exclusions;
      for (const auto& t : split_list(s("relevance_terms", a->relevance_terms, "scrypt"))) rs.relevance_terms.insert(t);
      const auto rel_path = p("relevancy_words", a->relevancy, ctx.data_file("relevancy_words.txt").string());
      const auto sim_path = p("similar_names", a->similar, ctx.data_file("scrypt_similar_names.txt").string());
      ctx.cfg.track_file(rel_path);
      ctx.cfg.track_file(sim_path);
      rs.relevancy_words = std::make_shared<const ghscan::KeywordMatcher>(ghscan::KeywordMatcher::load(rel_path, 0));
      rs.similar_names = read_lines(sim_path);
      const auto reviews = p("reviews", a->reviews, fixtures.empty() ? "" : (fixtures / "reviews").string());
      for (const auto& t : terms) {
        const auto file = reviews / (text::ascii_lower(t) + ".csv");
        if (!reviews.empty() && std::filesystem::exists(file)) {
          ctx.cfg.track_file(file);
          rs.review_decisions[t] = ghscan::load_review_decisions(file);
        }
      }
      for (const auto& t : terms) {
        auto tr = ghscan::scan_term(*source, t, rs);
        for (const auto& tc : tr.truncations) {
          ctx.log(fmt::format("{}: segment {} truncated ({} of {} retrievable)", t, ghscan::format_date(tc.range.from),
                              tc.retrieved, tc.total_count));
        }
        ctx.log(fmt::format("{}: {} initial, {} spam, {} filtered, {} final ({} API calls)", t, tr.ledger.initial,
                            tr.ledger.spam_removed, tr.ledger.mining_filtered, tr.ledger.final_count, tr.api_calls));
        report.terms.push_back(std::move(tr));
      }
    }
    if (mode != "repos") {
      std::vector<std::string> languages = split_list(s("languages", a->languages, ""));
      if (const auto lf = p("languages_file", a->languages_file, ""); !lf.empty()) {
        ctx.cfg.track_file(lf);
        for (auto& l : read_lines(lf)) languages.push_back(l);
      }
      std::vector<std::string> negatives(exclusions->keywords().begin(), exclusions->keywords().end());
      for (const auto& t : terms) {
        std::optional<double> retention;
        if (auto r = ctx.cfg.get("retention." + text::ascii_lower(t))) retention = number("retention", *r);
        std::vector<std::optional<std::string>> searches{std::nullopt};
        for (const auto& l : languages) searches.emplace_back(l);
        for (const auto& lang : searches) {
          ghscan::SearchQuery q;
          q.term = t;
          q.language = lang;
          q.negative_keywords = negatives;
          ghscan::CodeRow row;
          row.term = t;
          row.search = lang ? *lang : "simple";
          row.language = lang;
          row.estimate = ghscan::sample_code_search(*source, q);
          row.retention = retention;
          report.code.push_back(std::move(row));
        }
      }
    }
    report.check();

    auto emit = [&](const std::string& name, void (*writer)(std::ostream&, const ghscan::ScanReport&)) {
      std::ostringstream os;
      writer(os, report);
      ctx.emit("scan", name, os.str());
    };
    if (!report.terms.empty()) {
      emit("ledger", ghscan::write_ledger_csv);
      emit("years", ghscan::write_years_csv);
      emit("possible", ghscan::write_possible_csv);
    }
    if (!report.code.empty()) emit("code", ghscan::write_code_csv);
  };
}

}  // namespace hashecon::cli
