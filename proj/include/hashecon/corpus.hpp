#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hashecon::corpus {

struct PasswordRecord {
  std::string password;  // UTF-8
  double strength_bits = 0.0;
};

struct IngestionLog {
  std::uint64_t lines_read = 0;
  std::uint64_t undecodable_removed = 0;
  std::uint64_t below_min_length_removed = 0;
  std::uint64_t retained = 0;
};

/// Second decoding stage tried when a line is not valid UTF-8.
/// cp1252 leaves 0x81, 0x8D, 0x8F, 0x90, 0x9D undefined, so those lines are still dropped.
enum class FallbackEncoding { none, latin1, cp1252 };

struct IngestOptions {
  std::size_t min_length = 8;  // in Unicode scalar values; empty lines are always dropped
  FallbackEncoding fallback = FallbackEncoding::cp1252;
};

struct IngestResult {
  std::vector<PasswordRecord> records;
  IngestionLog log;
};

/// Reads newline-delimited raw bytes. A trailing '\r' is stripped from each line.
IngestResult ingest(const std::filesystem::path& path, const IngestOptions& options = {});
IngestResult ingest(std::istream& in, const IngestOptions& options = {});

/// Returns the UTF-8 form of `line` under the two-stage decoding policy.
std::optional<std::string> decode_line(std::string_view line, FallbackEncoding fallback);

FallbackEncoding parse_fallback(std::string_view name);

enum class Storage { exact, histogram };

inline constexpr double kDefaultBinWidth = 0.1;

/// Multiset of password bit-strengths.
///
/// Exact storage keeps sorted distinct values with cumulative counts, so weighted
/// strength files of any size stay compact. Histogram storage keeps fixed-width bins
/// starting at 0; within a bin the c members are modelled as spread uniformly at
/// lower + width * (j + 0.5) / c, which is what quantile() and count_at_most() use.
class StrengthDistribution {
 public:
  static StrengthDistribution exact(std::vector<double> strengths);
  static StrengthDistribution exact_weighted(std::vector<std::pair<double, std::uint64_t>> weighted);
  static StrengthDistribution histogram(std::span<const double> strengths, double bin_width = kDefaultBinWidth);
  static StrengthDistribution histogram_bins(double bin_width, std::vector<std::uint64_t> counts);

  Storage storage() const noexcept { return storage_; }
  std::uint64_t total_count() const noexcept { return total_; }
  double bin_width() const noexcept { return bin_width_; }

  /// Linear interpolation between order statistics (h = q * (n - 1)).
  double quantile(double q) const;
  /// Number of members with strength <= bits.
  std::uint64_t count_at_most(double bits) const;
  double mean() const;
  /// Population standard deviation.
  double stddev() const;

  StrengthDistribution to_histogram(double bin_width = kDefaultBinWidth) const;

  // Exact storage only.
  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint64_t> cumulative() const noexcept { return cumulative_; }
  // Histogram storage only.
  std::span<const std::uint64_t> bins() const noexcept { return bins_; }

  /// Member at sorted position `index` (0-based).
  double order_statistic(std::uint64_t index) const;

 private:
  StrengthDistribution() = default;
  friend StrengthDistribution synthesize_doubled(const StrengthDistribution& d);

  Storage storage_ = Storage::exact;
  std::uint64_t total_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> cumulative_;
  double bin_width_ = kDefaultBinWidth;
  std::vector<std::uint64_t> bins_;
};

StrengthDistribution build_distribution(std::span<const PasswordRecord> records,
                                        Storage storage = Storage::exact,
                                        double bin_width = kDefaultBinWidth);

/// Maps every strength s to 2s. Histograms keep their counts and double the bin width.
StrengthDistribution synthesize_doubled(const StrengthDistribution& d);

struct LengthStats {
  double mean = 0;
  double median = 0;
  double stddev = 0;
};

struct CorpusStats {
  std::uint64_t count = 0;
  double mean_bits = 0;
  double median_bits = 0;
  double stddev_bits = 0;
  double q1_bits = 0;
  double q3_bits = 0;
  std::optional<LengthStats> length;  // only when plaintext records are available
};

CorpusStats summarize(const StrengthDistribution& d);
CorpusStats summarize(std::span<const PasswordRecord> records);

void write_distribution_csv(std::ostream& out, const StrengthDistribution& d,
                            double bin_width = kDefaultBinWidth);
void write_stats_csv(std::ostream& out, const std::string& dataset, const CorpusStats& s);

/// Strength files come in two shapes: `strength_bits,count` (aggregate) or
/// `password,strength_bits` (per password, for passthrough estimation).
struct StrengthFile {
  std::optional<StrengthDistribution> aggregate;
  std::vector<PasswordRecord> records;
};

StrengthFile read_strength_file(const std::filesystem::path& path);

}  // namespace hashecon::corpus
