#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/stats.hpp"

namespace hashecon::stats {

std::uint64_t ContingencyTable::row_total(std::size_t r) const {
  return std::accumulate(counts.at(r).begin(), counts.at(r).end(), std::uint64_t{0});
}

std::uint64_t ContingencyTable::col_total(std::size_t c) const {
  std::uint64_t s = 0;
  for (const auto& row : counts) s += row.at(c);
  return s;
}

std::uint64_t ContingencyTable::total() const {
  std::uint64_t s = 0;
  for (std::size_t r = 0; r < rows(); ++r) s += row_total(r);
  return s;
}

void ContingencyTable::validate() const {
  if (row_labels.size() != counts.size()) throw DomainError("row label count does not match table rows");
  for (const auto& row : counts) {
    if (row.size() != col_labels.size()) throw DomainError("ragged contingency table");
  }
}

ContingencyTable ContingencyTable::parse_csv(std::string_view text, std::string source) {
  auto t = csv::parse(text, std::move(source));
  if (t.header.size() < 2) throw ParseError(t.source, 1, "contingency table needs at least one count column");
  ContingencyTable out;
  out.col_labels.assign(t.header.begin() + 1, t.header.end());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.row_labels.push_back(t.rows[r][0]);
    std::vector<std::uint64_t> row;
    for (std::size_t c = 1; c < t.rows[r].size(); ++c) row.push_back(csv::to_uint(t.rows[r][c], t, r));
    out.counts.push_back(std::move(row));
  }
  if (out.counts.empty()) throw ParseError(t.source, 0, "contingency table has no rows");
  return out;
}

ContingencyTable ContingencyTable::read_csv(const std::filesystem::path& path) {
  return parse_csv(text::read_file(path.string()), path.string());
}

void ContingencyTable::write_csv(std::ostream& out, std::string_view corner) const {
  out << csv::escape(corner);
  for (const auto& c : col_labels) out << ',' << csv::escape(c);
  out << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    out << csv::escape(row_labels[r]);
    for (auto v : counts[r]) out << ',' << v;
    out << '\n';
  }
}

TestResult chi2_gof(std::span<const std::uint64_t> observed) {
  if (observed.size() < 2) throw DomainError("goodness-of-fit needs at least 2 categories");
  double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<double> expected(observed.size(), total / static_cast<double>(observed.size()));
  auto r = chi2_gof(observed, expected);
  r.method = "chi2_gof_uniform";
  return r;
}

TestResult chi2_gof(std::span<const std::uint64_t> observed, std::span<const double> expected) {
  if (observed.size() < 2) throw DomainError("goodness-of-fit needs at least 2 categories");
  if (observed.size() != expected.size()) throw DomainError("observed and expected differ in length");
  TestResult r;
  r.method = "chi2_gof";
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw DomainError(fmt::format("expected count {} is not positive", i));
    if (expected[i] < 5.0) r.warnings.push_back(fmt::format("expected count {:.3g} < 5 in cell {}", expected[i], i));
    double d = static_cast<double>(observed[i]) - expected[i];
    stat += d * d / expected[i];
  }
  r.statistic = stat;
  r.df = static_cast<int>(observed.size()) - 1;
  r.p_value = chi2_sf(stat, *r.df);
  return r;
}

TestResult chi2_independence(const ContingencyTable& table) {
  table.validate();
  if (table.rows() < 2 || table.cols() < 2) throw DomainError("independence test needs at least a 2x2 table");
  const double n = static_cast<double>(table.total());
  std::vector<double> rt(table.rows()), ct(table.cols());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    rt[r] = static_cast<double>(table.row_total(r));
    if (rt[r] == 0) throw DomainError(fmt::format("row '{}' has a zero marginal", table.row_labels[r]));
  }
  for (std::size_t c = 0; c < table.cols(); ++c) {
    ct[c] = static_cast<double>(table.col_total(c));
    if (ct[c] == 0) throw DomainError(fmt::format("column '{}' has a zero marginal", table.col_labels[c]));
  }
  TestResult res;
  res.method = "chi2_independence";
  double stat = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      double e = rt[r] * ct[c] / n;
      if (e < 5.0) {
        res.warnings.push_back(fmt::format("expected count {:.3g} < 5 at ({}, {})", e, table.row_labels[r],
                                           table.col_labels[c]));
      }
      double d = static_cast<double>(table.counts[r][c]) - e;
      stat += d * d / e;
    }
  }
  res.statistic = stat;
  res.df = static_cast<int>((table.rows() - 1) * (table.cols() - 1));
  res.p_value = chi2_sf(stat, *res.df);
  return res;
}

std::vector<double> average_ranks(std::span<const double> values, double* tie_term) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  double ties = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    double t = static_cast<double>(j - i + 1);
    ties += t * t * t - t;
    i = j + 1;
  }
  if (tie_term) *tie_term = ties;
  return ranks;
}

namespace {

struct Pooled {
  std::vector<double> mean_rank;
  std::vector<std::size_t> sizes;
  double n = 0;
  double tie_term = 0;
};

Pooled pool_ranks(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DomainError("rank tests need at least 2 groups");
  std::vector<double> all;
  Pooled p;
  for (const auto& g : groups) {
    if (g.empty()) throw DomainError("rank tests need nonempty groups");
    all.insert(all.end(), g.begin(), g.end());
    p.sizes.push_back(g.size());
  }
  auto ranks = average_ranks(all, &p.tie_term);
  std::size_t off = 0;
  for (std::size_t s : p.sizes) {
    double sum = std::accumulate(ranks.begin() + off, ranks.begin() + off + s, 0.0);
    p.mean_rank.push_back(sum / static_cast<double>(s));
    off += s;
  }
  p.n = static_cast<double>(all.size());
  return p;
}

}  // namespace

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  auto p = pool_ranks(groups);
  TestResult r;
  r.method = "kruskal_wallis";
  r.df = static_cast<int>(groups.size()) - 1;
  const double n = p.n;
  const double correction = 1.0 - p.tie_term / (n * n * n - n);
  if (correction <= 0.0) {
    // Every value identical: no rank information at all.
    r.statistic = 0;
    r.p_value = 1;
    return r;
  }
  double h = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double d = p.mean_rank[g] - (n + 1) / 2.0;
    h += static_cast<double>(p.sizes[g]) * d * d;
  }
  h *= 12.0 / (n * (n + 1));
  r.statistic = h / correction;
  r.p_value = chi2_sf(r.statistic, *r.df);
  return r;
}

Adjustment parse_adjustment(std::string_view name) {
  if (name == "none") return Adjustment::none;
  if (name == "bonferroni") return Adjustment::bonferroni;
  if (name == "holm") return Adjustment::holm;
  throw DomainError(fmt::format("unknown adjustment '{}'", name));
}

namespace {

double dunn_z(const Pooled& p, std::size_t i, std::size_t j) {
  const double n = p.n;
  const double var = (n * (n + 1) / 12.0 - p.tie_term / (12.0 * (n - 1))) *
                     (1.0 / static_cast<double>(p.sizes[i]) + 1.0 / static_cast<double>(p.sizes[j]));
  if (var <= 0.0) return 0.0;
  return (p.mean_rank[i] - p.mean_rank[j]) / std::sqrt(var);
}

}  // namespace

std::vector<DunnPair> dunn_all_pairs(std::span<const std::vector<double>> groups, Adjustment adjustment) {
  auto p = pool_ranks(groups);
  std::vector<DunnPair> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      DunnPair d{i, j, {}};
      d.result.method = "dunn";
      d.result.statistic = dunn_z(p, i, j);
      d.result.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(d.result.statistic)));
      out.push_back(std::move(d));
    }
  }
  const double m = static_cast<double>(out.size());
  if (adjustment == Adjustment::bonferroni) {
    for (auto& d : out) {
      d.result.p_value = std::min(1.0, d.result.p_value * m);
      d.result.method = "dunn_bonferroni";
    }
  } else if (adjustment == Adjustment::holm) {
    std::vector<std::size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out[a].result.p_value < out[b].result.p_value; });
    double running = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto& r = out[order[k]].result;
      running = std::max(running, std::min(1.0, (m - static_cast<double>(k)) * r.p_value));
      r.p_value = running;
      r.method = "dunn_holm";
    }
  }
  return out;
}

TestResult dunn_pairwise(std::span<const std::vector<double>> groups, std::size_t i, std::size_t j,
                         Adjustment adjustment) {
  if (i >= groups.size() || j >= groups.size() || i == j) {
    throw DomainError(fmt::format("invalid Dunn pair ({}, {}) for {} groups", i, j, groups.size()));
  }
  const bool swap = i > j;
  for (auto& d : dunn_all_pairs(groups, adjustment)) {
    if (d.i == std::min(i, j) && d.j == std::max(i, j)) {
      if (swap) d.result.statistic = -d.result.statistic;
      return d.result;
    }
  }
  throw InternalError("Dunn pair not produced");
}

void write_results_csv(std::ostream& out, std::span<const TestResult> results) {
  out << "method,statistic,df,p\n";
  for (const auto& r : results) {
    out << csv::escape(r.method) << ',' << fmt::format("{:.6f}", r.statistic) << ','
        << (r.df ? std::to_string(*r.df) : std::string()) << ',' << fmt::format("{:.6g}", r.p_value) << '\n';
  }
}

}  // namespace hashecon::stats
