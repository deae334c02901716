#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/paramclass.hpp"

namespace hashecon::paramclass {

void Argon2Config::validate() const {
  if (t < 1) throw DomainError("Argon2 iterations must be >= 1");
  if (p < 1) throw DomainError("Argon2 parallelism must be >= 1");
  if (memory_kib < 8ULL * p) {
    throw DomainError(fmt::format("Argon2 memory {} KiB is below 8 * p = {}", memory_kib, 8ULL * p));
  }
}

AnchorSet::AnchorSet(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  std::set<std::uint32_t> ts;
  for (const auto& a : anchors_) {
    if (a.t < 1 || a.memory_kib < 1) throw DomainError("anchor needs t >= 1 and memory >= 1 KiB");
    if (!ts.insert(a.t).second) throw DomainError(fmt::format("anchor set repeats t = {}", a.t));
  }
  if (ts.size() < 2) throw DomainError("anchor set needs at least two distinct iteration counts");
}

AnchorSet AnchorSet::load(const std::filesystem::path& path) {
  auto table = csv::read(path);
  const auto tc = table.column("t");
  const auto mc = table.column("memory_kib");
  std::vector<Anchor> anchors;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    anchors.push_back({static_cast<std::uint32_t>(csv::to_uint(table.rows[r][tc], table, r)),
                       csv::to_uint(table.rows[r][mc], table, r)});
  }
  return AnchorSet(std::move(anchors));
}

double LogLogFit::predicted_log_memory(double t) const { return intercept + slope * std::log(t); }

double LogLogFit::predicted_memory_kib(double t) const { return std::exp(predicted_log_memory(t)); }

LogLogFit fit_loglog(const AnchorSet& anchors) {
  const auto pts = anchors.anchors();
  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& a : pts) {
    sx += std::log(static_cast<double>(a.t));
    sy += std::log(static_cast<double>(a.memory_kib));
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& a : pts) {
    double dx = std::log(static_cast<double>(a.t)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(static_cast<double>(a.memory_kib)) - my);
  }
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (const auto& a : pts) {
    double e = std::log(static_cast<double>(a.memory_kib)) - f.predicted_log_memory(a.t);
    f.residual_sse += e * e;
  }
  return f;
}

std::string_view to_string(StrengthLabel l) { return l == StrengthLabel::weaker ? "weaker" : "stronger"; }

StrengthLabel classify(const Argon2Config& config, const LogLogFit& fit) {
  config.validate();
  const double lm = std::log(static_cast<double>(config.memory_kib));
  // Relative tolerance so a config sitting exactly on the line is not lost to rounding.
  const double line = fit.predicted_log_memory(config.t);
  return lm >= line - 1e-12 * std::max(1.0, std::abs(line)) ? StrengthLabel::stronger : StrengthLabel::weaker;
}

Classifier::Classifier(AnchorSet anchors) : anchors_(std::move(anchors)), fit_(fit_loglog(anchors_)) {}

StrengthLabel Classifier::classify(const Argon2Config& config) const {
  if (paramclass::classify(config, fit_) == StrengthLabel::stronger) return StrengthLabel::stronger;
  for (const auto& a : anchors_.anchors()) {
    if (config.t >= a.t && config.memory_kib >= a.memory_kib) return StrengthLabel::stronger;
  }
  return StrengthLabel::weaker;
}

std::vector<ConfigCluster> cluster_configs(std::span<const Argon2Config> configs) {
  if (configs.empty()) throw DomainError("no configurations to cluster");
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint64_t> counts;
  for (const auto& c : configs) ++counts[{c.t, c.memory_kib}];
  std::vector<ConfigCluster> out;
  for (const auto& [k, n] : counts) out.push_back({k.first, k.second, n});
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.count > b.count; });
  return out;
}

std::vector<LabeledConfig> label_all(std::span<const Argon2Config> configs, const Classifier& classifier) {
  std::vector<LabeledConfig> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back({c, classifier.classify(c)});
  return out;
}

Grouping Grouping::by_category(std::vector<std::string> order) {
  Grouping g;
  g.field = GroupField::category;
  g.category_order = std::move(order);
  return g;
}

Grouping Grouping::by_age_default() {
  Grouping g;
  g.field = GroupField::created_year;
  g.buckets = {{"<=2018", 2018}, {"2019-2021", 2021}, {"2022-2024", 2024}};
  return g;
}

Grouping Grouping::by_stars_default() {
  Grouping g;
  g.field = GroupField::stars;
  g.buckets = {{"3-4", 4}, {"5-10", 10}, {"11-30", 30}, {">30", std::nullopt}};
  return g;
}

namespace {

std::size_t bucket_of(const Grouping& g, std::int64_t v, const Argon2Config& c) {
  for (std::size_t i = 0; i < g.buckets.size(); ++i) {
    if (!g.buckets[i].upper_inclusive || v <= *g.buckets[i].upper_inclusive) return i;
  }
  throw DomainError(fmt::format("config '{}' value {} falls outside every bucket", c.source_label, v));
}

}  // namespace

stats::ContingencyTable strength_table(std::span<const LabeledConfig> labeled, const Grouping& grouping) {
  stats::ContingencyTable t;
  t.row_labels = {"weaker", "stronger"};
  auto row = [](StrengthLabel l) { return l == StrengthLabel::weaker ? 0u : 1u; };

  if (grouping.field == GroupField::category) {
    std::vector<std::string> cols = grouping.category_order;
    std::set<std::string> seen;
    for (const auto& lc : labeled) {
      if (lc.config.category.empty()) {
        throw DomainError(fmt::format("config '{}' has no category", lc.config.source_label));
      }
      seen.insert(lc.config.category);
    }
    if (cols.empty()) {
      cols.assign(seen.begin(), seen.end());
    } else {
      for (const auto& s : seen) {
        if (std::find(cols.begin(), cols.end(), s) == cols.end()) {
          throw DomainError(fmt::format("category '{}' missing from the requested order", s));
        }
      }
      std::erase_if(cols, [&](const std::string& c) { return !seen.count(c); });
    }
    t.col_labels = cols;
    t.counts.assign(2, std::vector<std::uint64_t>(cols.size(), 0));
    for (const auto& lc : labeled) {
      auto c = static_cast<std::size_t>(std::find(cols.begin(), cols.end(), lc.config.category) - cols.begin());
      ++t.counts[row(lc.label)][c];
    }
    return t;
  }

  if (grouping.buckets.empty()) throw DomainError("numeric grouping needs buckets");
  for (const auto& b : grouping.buckets) t.col_labels.push_back(b.label);
  t.counts.assign(2, std::vector<std::uint64_t>(grouping.buckets.size(), 0));
  for (const auto& lc : labeled) {
    std::optional<std::int64_t> v;
    if (grouping.field == GroupField::created_year) {
      if (lc.config.created_year) v = *lc.config.created_year;
    } else {
      v = lc.config.stars;
    }
    if (!v) throw DomainError(fmt::format("config '{}' lacks the grouping attribute", lc.config.source_label));
    ++t.counts[row(lc.label)][bucket_of(grouping, *v, lc.config)];
  }
  return t;
}

std::vector<Argon2Config> load_configs(const std::filesystem::path& path) {
  auto table = csv::read(path);
  const auto tc = table.column("t");
  const auto mc = table.column("memory_kib");
  auto opt = [&](const char* name) -> std::optional<std::size_t> {
    if (table.has_column(name)) return table.column(name);
    return std::nullopt;
  };
  const auto lc = opt("source_label"), pc = opt("p"), cc = opt("category"), sc = opt("stars"),
             yc = opt("created_year");
  std::vector<Argon2Config> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Argon2Config c;
    c.t = static_cast<std::uint32_t>(csv::to_uint(row[tc], table, r));
    c.memory_kib = csv::to_uint(row[mc], table, r);
    if (pc && !row[*pc].empty()) c.p = static_cast<std::uint32_t>(csv::to_uint(row[*pc], table, r));
    if (lc) c.source_label = row[*lc];
    if (cc) c.category = row[*cc];
    if (sc && !row[*sc].empty()) c.stars = csv::to_int(row[*sc], table, r);
    if (yc && !row[*yc].empty()) c.created_year = static_cast<int>(csv::to_int(row[*yc], table, r));
    try {
      c.validate();
    } catch (const DomainError& e) {
      throw ParseError(table.source, table.line_numbers[r], e.what());
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace hashecon::paramclass
