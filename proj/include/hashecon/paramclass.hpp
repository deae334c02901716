#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hashecon/stats.hpp"

namespace hashecon::paramclass {

struct Argon2Config {
  std::uint32_t t = 1;
  std::uint64_t memory_kib = 0;
  std::uint32_t p = 1;
  std::string source_label;
  // Grouping attributes, present when the config came from a repository survey.
  std::string category;
  std::optional<std::int64_t> stars;
  std::optional<int> created_year;

  void validate() const;
};

struct Anchor {
  std::uint32_t t = 1;
  std::uint64_t memory_kib = 0;
};

/// Reference recommendations the log-log line is fit through. Needs >= 2 anchors, no t repeated.
class AnchorSet {
 public:
  explicit AnchorSet(std::vector<Anchor> anchors);
  /// CSV `t,memory_kib`.
  static AnchorSet load(const std::filesystem::path& path);

  std::span<const Anchor> anchors() const noexcept { return anchors_; }

 private:
  std::vector<Anchor> anchors_;
};

/// ln(memory_kib) = intercept + slope * ln(t)
struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  double residual_sse = 0;

  double predicted_log_memory(double t) const;
  double predicted_memory_kib(double t) const;
};

/// Ordinary least squares on (ln t, ln m), unweighted.
LogLogFit fit_loglog(const AnchorSet& anchors);

enum class StrengthLabel { weaker, stronger };
std::string_view to_string(StrengthLabel l);

/// Line test only: stronger iff ln(m) >= intercept + slope * ln(t). p is ignored.
StrengthLabel classify(const Argon2Config& config, const LogLogFit& fit);

/// Line test plus anchor dominance: a config that uses at least the iterations and at
/// least the memory of some anchor is never weaker than that recommendation. This keeps
/// every anchor "stronger" even where the regression line passes above it.
class Classifier {
 public:
  explicit Classifier(AnchorSet anchors);

  StrengthLabel classify(const Argon2Config& config) const;
  const LogLogFit& fit() const noexcept { return fit_; }
  const AnchorSet& anchors() const noexcept { return anchors_; }

 private:
  AnchorSet anchors_;
  LogLogFit fit_;
};

struct ConfigCluster {
  std::uint32_t t = 0;
  std::uint64_t memory_kib = 0;
  std::uint64_t count = 0;
};

/// Frequency of each (t, m), by count descending, ties by (t, m) ascending.
std::vector<ConfigCluster> cluster_configs(std::span<const Argon2Config> configs);

struct LabeledConfig {
  Argon2Config config;
  StrengthLabel label = StrengthLabel::weaker;
};

std::vector<LabeledConfig> label_all(std::span<const Argon2Config> configs, const Classifier& classifier);

/// Buckets an integer attribute by inclusive upper bounds; the last bucket may be open.
struct Bucket {
  std::string label;
  std::optional<std::int64_t> upper_inclusive;  // nullopt = no upper bound
};

enum class GroupField { category, created_year, stars };

struct Grouping {
  GroupField field = GroupField::category;
  std::vector<Bucket> buckets;            // created_year / stars
  std::vector<std::string> category_order;  // category; empty = ascending

  static Grouping by_category(std::vector<std::string> order = {});
  /// <= 2018, 2019-2021, 2022-2024
  static Grouping by_age_default();
  /// 3-4, 5-10, 11-30, >30
  static Grouping by_stars_default();
};

/// Rows: weaker, stronger. Columns: the grouping's buckets (empty columns kept for
/// numeric buckets, omitted for categories never seen).
stats::ContingencyTable strength_table(std::span<const LabeledConfig> labeled, const Grouping& grouping);

/// CSV `source_label,t,memory_kib,p,category,stars,created_year`; trailing
/// attribute columns may be empty.
std::vector<Argon2Config> load_configs(const std::filesystem::path& path);

}  // namespace hashecon::paramclass
