#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "hashecon/attacksim.hpp"
#include "hashecon/corpus.hpp"
#include "hashecon/econcost.hpp"
#include "hashecon/strength.hpp"

namespace hashecon::cli {

namespace {

struct SimArgs {
  std::string strengths, corpus, name, estimator, dictionary, min_length, fallback, storage, bin_width, configs,
      budgets, market, overhead, curve_points, threads;
  bool doubled = false;
  std::map<std::string, CLI::Option*> opt;
};

bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes" || v == "on"; }

}  // namespace

Action register_simulate(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("simulate", "Compromise rates per dataset, hash configuration and budget");
  auto a = std::make_shared<SimArgs>();
  auto& o = a->opt;
  o["strengths"] = sub->add_option("--strengths", a->strengths, "strength file (strength_bits,count or password,strength_bits)");
  o["corpus"] = sub->add_option("--corpus", a->corpus, "plaintext password list, one per line");
  o["name"] = sub->add_option("--name", a->name, "dataset name (default: file stem)");
  o["estimator"] = sub->add_option("--estimator", a->estimator, "pattern | bruteforce (for --corpus)");
  o["dictionary"] = sub->add_option("--dictionary", a->dictionary, "ranked word list for the pattern estimator");
  o["min_length"] = sub->add_option("--min-length", a->min_length, "minimum password length (default 8)");
  o["fallback"] = sub->add_option("--fallback", a->fallback, "none | latin1 | cp1252 decoding fallback");
  o["doubled"] = sub->add_flag("--doubled", a->doubled, "also simulate the distribution with doubled strengths");
  o["storage"] = sub->add_option("--storage", a->storage, "exact | histogram");
  o["bin_width"] = sub->add_option("--bin-width", a->bin_width, "histogram bin width in bits (default 0.1)");
  o["configs"] = sub->add_option("--configs", a->configs, "comma list of hash configurations");
  o["budgets"] = sub->add_option("--budgets", a->budgets, "comma list of USD budgets per account");
  o["market"] = sub->add_option("--market", a->market, "mining market snapshot CSV");
  o["overhead"] = sub->add_option("--overhead", a->overhead, "RandomX overhead factor (default 100)");
  o["curve_points"] = sub->add_option("--curve-points", a->curve_points, "log-spaced budgets for curve.csv (0 = off)");
  o["threads"] = sub->add_option("--threads", a->threads, "worker threads (0 = all cores)");
  sub->get_option("--corpus")->excludes(sub->get_option("--strengths"));

  return [a, &ctx] {
    auto s = [&](const std::string& key, const std::string& value, const std::string& fallback) {
      return ctx.setting(key, given(a->opt[key]), value, fallback);
    };
    const auto strengths = ctx.path_setting("strengths", given(a->opt["strengths"]), a->strengths, "");
    const auto corpus_path = ctx.path_setting("corpus", given(a->opt["corpus"]), a->corpus, "");
    if (strengths.empty() == corpus_path.empty()) throw UsageError("give exactly one of --strengths or --corpus");
    const auto input = strengths.empty() ? corpus_path : strengths;
    ctx.cfg.track_file(input);
    const auto name = s("name", a->name, input.stem().string());
    const auto storage = s("storage", a->storage, "exact");
    if (storage != "exact" && storage != "histogram") throw UsageError("--storage must be exact or histogram");
    const double bin_width = number("bin_width", s("bin_width", a->bin_width, "0.1"));
    const auto threads = static_cast<unsigned>(number("threads", s("threads", a->threads, "0")));
    const auto st = storage == "exact" ? corpus::Storage::exact : corpus::Storage::histogram;

    std::optional<corpus::StrengthDistribution> dist;
    corpus::CorpusStats stats;
    if (!corpus_path.empty()) {
      corpus::IngestOptions io;
      io.min_length = static_cast<std::size_t>(number("min_length", s("min_length", a->min_length, "8")));
      io.fallback = corpus::parse_fallback(s("fallback", a->fallback, "cp1252"));
      auto ing = corpus::ingest(corpus_path, io);
      ctx.log(fmt::format("{}: read {} lines, {} undecodable, {} below minimum length, {} retained", name,
                          ing.log.lines_read, ing.log.undecodable_removed, ing.log.below_min_length_removed,
                          ing.log.retained));
      const auto dict = ctx.path_setting("dictionary", given(a->opt["dictionary"]), a->dictionary, "");
      if (!dict.empty()) ctx.cfg.track_file(dict);
      auto est = corpus::make_estimator(s("estimator", a->estimator, "pattern"), dict);
      corpus::estimate_all(ing.records, *est, threads);
      dist = corpus::build_distribution(ing.records, st, bin_width);
      stats = corpus::summarize(ing.records);
      std::ostringstream log;
      log << "dataset,lines_read,undecodable_removed,below_min_length_removed,retained\n"
          << fmt::format("{},{},{},{},{}\n", name, ing.log.lines_read, ing.log.undecodable_removed,
                         ing.log.below_min_length_removed, ing.log.retained);
      ctx.emit("simulate", "ingestion", log.str());
    } else {
      auto file = corpus::read_strength_file(strengths);
      if (file.aggregate) {
        dist = st == corpus::Storage::exact ? *file.aggregate : file.aggregate->to_histogram(bin_width);
        stats = corpus::summarize(*dist);
      } else {
        dist = corpus::build_distribution(file.records, st, bin_width);
        stats = corpus::summarize(file.records);
      }
    }

    std::vector<attacksim::NamedDistribution> dists{{name, *dist}};
    std::vector<corpus::CorpusStats> all_stats{stats};
    if (truthy(s("doubled", a->doubled ? "true" : "false", "false"))) {
      auto doubled = corpus::synthesize_doubled(*dist);
      all_stats.push_back(corpus::summarize(doubled));
      dists.push_back({name + "_doubled", std::move(doubled)});
    }

    std::vector<econcost::HashConfig> configs;
    for (const auto& spec : split_list(s("configs", a->configs, "sha256,argon2id:47104,argon2id:2097152"))) {
      configs.push_back(econcost::parse_hash_config(spec));
    }
    if (configs.empty()) throw UsageError("no hash configurations given");
    std::vector<attacksim::BudgetScenario> budgets;
    for (double b : number_list("budgets", s("budgets", a->budgets, "0.1,1,20"))) {
      budgets.push_back(attacksim::BudgetScenario::make(b));
    }
    if (budgets.empty()) throw UsageError("no budgets given");

    const auto market = ctx.path_setting("market", given(a->opt["market"]), a->market,
                                         ctx.data_file("market_2025-02-20.csv").string());
    ctx.cfg.track_file(market);
    const double overhead = number("overhead", s("overhead", a->overhead, "100"));
    const auto book = econcost::CostBook::from_markets(econcost::MarketSnapshot::load(market), overhead);
    const auto points = static_cast<std::size_t>(number("curve_points", s("curve_points", a->curve_points, "50")));

    auto rows = attacksim::simulate_matrix(dists, configs, budgets, book, threads);
    std::ostringstream res;
    attacksim::write_results_csv(res, rows);
    ctx.emit("simulate", "results", res.str());
    for (const auto& r : rows) {
      ctx.out << fmt::format("{:<20} {:<30} ${:<8g} {:8.4f}%\n", r.dataset, r.config.label(), r.budget.usd_per_account,
                             100.0 * r.compromise_rate);
    }

    if (points > 0) {
      auto grid = attacksim::log_budget_grid(1e-3, 1e3, points);
      auto curve = attacksim::simulate_matrix(dists, configs, grid, book, threads);
      std::ostringstream c;
      attacksim::write_results_csv(c, curve);
      ctx.emit("simulate", "curve", c.str());
    }

    std::ostringstream statcsv;
    for (std::size_t i = 0; i < dists.size(); ++i) {
      std::ostringstream one;
      corpus::write_stats_csv(one, dists[i].name, all_stats[i]);
      auto text = one.str();
      statcsv << (i == 0 ? text : text.substr(text.find('\n') + 1));
      std::ostringstream d;
      corpus::write_distribution_csv(d, dists[i].distribution, dists[i].distribution.storage() == corpus::Storage::histogram
                                                                   ? dists[i].distribution.bin_width()
                                                                   : bin_width);
      ctx.emit("simulate", "distribution_" + dists[i].name, d.str());
    }
    ctx.emit("simulate", "stats", statcsv.str());
  };
}

}  // namespace hashecon::cli
