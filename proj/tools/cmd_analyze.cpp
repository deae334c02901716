#include <map>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "hashecon/common/csv.hpp"
#include "hashecon/stats.hpp"

namespace hashecon::cli {

namespace {

struct AnalyzeArgs {
  std::string test, input, groups, years, adjust, expected;
  std::map<std::string, CLI::Option*> opt;
};

struct Row {
  std::string comparison;
  stats::TestResult result;
};

std::vector<std::vector<double>> year_groups(const std::filesystem::path& path, std::vector<std::string>& names,
                                             const std::string& years) {
  auto t = csv::read(path);
  const auto ac = t.column("algorithm"), yc = t.column("year"), cc = t.column("count");
  std::map<std::string, std::map<std::int64_t, double>> data;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& alg = t.rows[r][ac];
    if (!data.count(alg)) order.push_back(alg);
    data[alg][csv::to_int(t.rows[r][yc], t, r)] += csv::to_double(t.rows[r][cc], t, r);
  }
  if (names.empty()) names = order;
  std::optional<std::pair<std::int64_t, std::int64_t>> range;
  if (!years.empty()) {
    auto dash = years.find('-');
    if (dash == std::string::npos) throw UsageError("--years expects FROM-TO");
    range = {static_cast<std::int64_t>(number("years", years.substr(0, dash))),
             static_cast<std::int64_t>(number("years", years.substr(dash + 1)))};
  }
  std::vector<std::vector<double>> out;
  for (const auto& n : names) {
    auto it = data.find(n);
    if (it == data.end()) throw UsageError(fmt::format("group '{}' not found in {}", n, path.string()));
    std::vector<double> g;
    if (range) {
      for (auto y = range->first; y <= range->second; ++y) {
        auto v = it->second.find(y);
        g.push_back(v == it->second.end() ? 0.0 : v->second);
      }
    } else {
      for (const auto& [y, v] : it->second) g.push_back(v);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::string fmt_p(double p) { return fmt::format("{:.6g}", p); }

}  // namespace

Action register_analyze(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("analyze", "Chi-square, Kruskal-Wallis and Dunn tests on report tables");
  auto a = std::make_shared<AnalyzeArgs>();
  auto& o = a->opt;
  o["test"] = sub->add_option("--test", a->test, "gof | independence | kruskal | dunn")
                  ->check(CLI::IsMember({"gof", "independence", "kruskal", "dunn"}));
  o["input"] = sub->add_option("--input", a->input, "contingency CSV, or a years CSV for kruskal/dunn");
  o["groups"] = sub->add_option("--groups", a->groups, "comma list of algorithms (kruskal/dunn)");
  o["years"] = sub->add_option("--years", a->years, "year range FROM-TO (kruskal/dunn)");
  o["adjust"] = sub->add_option("--adjust", a->adjust, "none | bonferroni | holm (dunn)");
  o["expected"] = sub->add_option("--expected", a->expected, "comma list of expected counts (gof)");

  return [a, &ctx] {
    auto s = [&](const std::string& key, const std::string& value, const std::string& fallback) {
      return ctx.setting(key, given(a->opt[key]), value, fallback);
    };
    const auto test = s("test", a->test, "");
    if (test.empty()) throw UsageError("analyze needs --test");
    const auto input = ctx.path_setting("input", given(a->opt["input"]), a->input, "");
    if (input.empty()) throw UsageError("analyze needs --input");
    ctx.cfg.track_file(input);

    std::vector<Row> rows;
    if (test == "gof" || test == "independence") {
      auto table = stats::ContingencyTable::read_csv(input);
      table.validate();
      if (test == "independence") {
        rows.push_back({fmt::format("{}x{}", table.rows(), table.cols()), stats::chi2_independence(table)});
      } else {
        std::vector<std::uint64_t> observed;
        if (table.rows() == 1) {
          observed = table.counts[0];
        } else if (table.cols() == 1) {
          for (const auto& r : table.counts) observed.push_back(r[0]);
        } else {
          throw UsageError("goodness of fit needs a single row or a single count column");
        }
        auto expected = number_list("expected", s("expected", a->expected, ""));
        rows.push_back({"observed", expected.empty() ? stats::chi2_gof(observed) : stats::chi2_gof(observed, expected)});
      }
    } else {
      auto names = split_list(s("groups", a->groups, ""));
      auto groups = year_groups(input, names, s("years", a->years, ""));
      if (test == "kruskal") {
        rows.push_back({fmt::format("{} groups", names.size()), stats::kruskal_wallis(groups)});
      } else {
        for (auto& d : stats::dunn_all_pairs(groups, stats::parse_adjustment(s("adjust", a->adjust, "none")))) {
          rows.push_back({names[d.i] + " vs " + names[d.j], std::move(d.result)});
        }
      }
    }

    std::ostringstream out;
    out << "test,comparison,method,statistic,df,p,warnings\n";
    for (const auto& r : rows) {
      std::string warnings;
      for (const auto& w : r.result.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
      out << fmt::format("{},{},{},{:.6f},{},{},{}\n", test, csv::escape(r.comparison), r.result.method,
                         r.result.statistic, r.result.df ? std::to_string(*r.result.df) : "", fmt_p(r.result.p_value),
                         csv::escape(warnings));
      ctx.out << fmt::format("{:<24} {:<18} stat={:.4f}{} p={:.4g}\n", r.comparison, r.result.method, r.result.statistic,
                             r.result.df ? fmt::format(" df={}", *r.result.df) : "", r.result.p_value);
      for (const auto& w : r.result.warnings) ctx.log("warning: " + w);
    }
    ctx.emit("analyze", "tests", out.str());
  };
}

}  // namespace hashecon::cli
