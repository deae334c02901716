#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "hashecon/common/csv.hpp"
#include "hashecon/paramclass.hpp"

namespace hashecon::cli {

namespace {

std::string table_csv(const stats::ContingencyTable& t, std::string_view corner) {
  std::ostringstream s;
  t.write_csv(s, corner);
  return s.str();
}

}  // namespace

Action register_classify(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("classify", "Label Argon2 configurations against the anchor regression line");
  auto configs = std::make_shared<std::string>();
  auto anchors = std::make_shared<std::string>();
  auto* configs_opt = sub->add_option("--configs", *configs, "CSV source_label,t,memory_kib[,p,category,stars,created_year]");
  auto* anchors_opt = sub->add_option("--anchors", *anchors, "anchor CSV t,memory_kib");

  return [=, &ctx] {
    const auto cfg_path = ctx.path_setting("configs_file", given(configs_opt), *configs, "");
    if (cfg_path.empty()) throw UsageError("classify needs --configs");
    if (std::filesystem::exists(cfg_path) && std::filesystem::file_size(cfg_path) == 0) {
      throw UsageError(fmt::format("{} is empty", cfg_path.string()));
    }
    const auto anchor_path = ctx.path_setting("anchors", given(anchors_opt), *anchors,
                                              ctx.data_file("owasp_anchors.csv").string());
    ctx.cfg.track_file(cfg_path);
    ctx.cfg.track_file(anchor_path);

    auto list = paramclass::load_configs(cfg_path);
    if (list.empty()) throw UsageError(fmt::format("{} has no configurations", cfg_path.string()));
    paramclass::Classifier classifier(paramclass::AnchorSet::load(anchor_path));
    auto labeled = paramclass::label_all(list, classifier);

    std::ostringstream lab;
    lab << "source_label,t,memory_kib,p,label\n";
    std::uint64_t weaker = 0;
    for (const auto& l : labeled) {
      lab << fmt::format("{},{},{},{},{}\n", csv::escape(l.config.source_label), l.config.t, l.config.memory_kib,
                         l.config.p, paramclass::to_string(l.label));
      weaker += l.label == paramclass::StrengthLabel::weaker;
    }
    ctx.emit("classify", "labeled", lab.str());

    std::ostringstream scatter;
    scatter << "t,memory_kib,count,label\n";
    for (const auto& c : paramclass::cluster_configs(list)) {
      paramclass::Argon2Config probe;
      probe.t = c.t;
      probe.memory_kib = c.memory_kib;
      scatter << fmt::format("{},{},{},{}\n", c.t, c.memory_kib, c.count, paramclass::to_string(classifier.classify(probe)));
    }
    ctx.emit("classify", "scatter", scatter.str());

    const auto& fit = classifier.fit();
    std::ostringstream line;
    line << "t,predicted_memory_kib,anchor_memory_kib\n";
    std::uint32_t max_t = 10;
    for (const auto& c : list) max_t = std::max(max_t, c.t);
    for (std::uint32_t t = 1; t <= max_t; ++t) {
      std::string anchor;
      for (const auto& an : classifier.anchors().anchors()) {
        if (an.t == t) anchor = std::to_string(an.memory_kib);
      }
      line << fmt::format("{},{:.2f},{}\n", t, fit.predicted_memory_kib(t), anchor);
    }
    ctx.emit("classify", "fit_line", line.str());
    ctx.emit("classify", "fit",
             fmt::format("slope,intercept,residual_sse,anchors\n{:.6f},{:.6f},{:.6g},{}\n", fit.slope, fit.intercept,
                         fit.residual_sse, classifier.anchors().anchors().size()));

    auto all_have = [&](auto pred) { return std::all_of(list.begin(), list.end(), pred); };
    if (all_have([](const auto& c) { return c.created_year.has_value(); })) {
      ctx.emit("classify", "strength_by_age",
               table_csv(paramclass::strength_table(labeled, paramclass::Grouping::by_age_default()), "strength"));
    }
    if (all_have([](const auto& c) { return !c.category.empty(); })) {
      ctx.emit("classify", "strength_by_category",
               table_csv(paramclass::strength_table(labeled, paramclass::Grouping::by_category()), "strength"));
    }
    if (all_have([](const auto& c) { return c.stars.has_value(); })) {
      ctx.emit("classify", "strength_by_stars",
               table_csv(paramclass::strength_table(labeled, paramclass::Grouping::by_stars_default()), "strength"));
    }
    ctx.out << fmt::format("{} configurations: {} weaker, {} stronger (line ln m = {:.5f} {:+.5f} ln t)\n", list.size(),
                           weaker, list.size() - weaker, fit.intercept, fit.slope);
  };
}

}  // namespace hashecon::cli
