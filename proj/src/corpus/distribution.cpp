#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/corpus.hpp"

namespace hashecon::corpus {

namespace {

void check_strength(double s) {
  if (!std::isfinite(s) || s < 0.0) {
    throw DomainError(fmt::format("strength must be finite and >= 0, got {}", s));
  }
}

void check_bin_width(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("bin width must be positive");
}

std::size_t bin_index(double s, double w) {
  // The nudge keeps values such as 0.3 with w = 0.1 out of the bin below.
  return static_cast<std::size_t>(std::floor(s / w + 1e-9));
}

std::vector<std::uint64_t> prefix_sums(std::span<const std::uint64_t> counts) {
  std::vector<std::uint64_t> cum(counts.size());
  std::inclusive_scan(counts.begin(), counts.end(), cum.begin());
  return cum;
}

}  // namespace

StrengthDistribution StrengthDistribution::exact(std::vector<double> strengths) {
  if (strengths.empty()) throw EmptyCorpusError("distribution needs at least one strength");
  for (double s : strengths) check_strength(s);
  std::sort(strengths.begin(), strengths.end());
  StrengthDistribution d;
  d.storage_ = Storage::exact;
  for (double s : strengths) {
    if (d.values_.empty() || d.values_.back() != s) {
      d.values_.push_back(s);
      d.cumulative_.push_back(d.cumulative_.empty() ? 0 : d.cumulative_.back());
    }
    ++d.cumulative_.back();
  }
  d.total_ = strengths.size();
  return d;
}

StrengthDistribution StrengthDistribution::exact_weighted(std::vector<std::pair<double, std::uint64_t>> weighted) {
  std::sort(weighted.begin(), weighted.end());
  StrengthDistribution d;
  d.storage_ = Storage::exact;
  for (const auto& [s, count] : weighted) {
    check_strength(s);
    if (count == 0) continue;
    if (d.values_.empty() || d.values_.back() != s) {
      d.values_.push_back(s);
      d.cumulative_.push_back(d.cumulative_.empty() ? 0 : d.cumulative_.back());
    }
    d.cumulative_.back() += count;
  }
  if (d.values_.empty()) throw EmptyCorpusError("distribution needs at least one strength");
  d.total_ = d.cumulative_.back();
  return d;
}

StrengthDistribution StrengthDistribution::histogram(std::span<const double> strengths, double bin_width) {
  check_bin_width(bin_width);
  if (strengths.empty()) throw EmptyCorpusError("distribution needs at least one strength");
  std::vector<std::uint64_t> counts;
  for (double s : strengths) {
    check_strength(s);
    std::size_t b = bin_index(s, bin_width);
    if (b >= counts.size()) counts.resize(b + 1, 0);
    ++counts[b];
  }
  return histogram_bins(bin_width, std::move(counts));
}

StrengthDistribution StrengthDistribution::histogram_bins(double bin_width, std::vector<std::uint64_t> counts) {
  check_bin_width(bin_width);
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  if (counts.empty()) throw EmptyCorpusError("distribution needs at least one strength");
  StrengthDistribution d;
  d.storage_ = Storage::histogram;
  d.bin_width_ = bin_width;
  d.cumulative_ = prefix_sums(counts);
  d.total_ = d.cumulative_.back();
  d.bins_ = std::move(counts);
  return d;
}

double StrengthDistribution::order_statistic(std::uint64_t index) const {
  if (index >= total_) throw DomainError("order statistic index out of range");
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), index);
  auto k = static_cast<std::size_t>(it - cumulative_.begin());
  if (storage_ == Storage::exact) return values_[k];
  std::uint64_t before = k == 0 ? 0 : cumulative_[k - 1];
  std::uint64_t c = bins_[k];
  double j = static_cast<double>(index - before);
  return bin_width_ * (static_cast<double>(k) + (j + 0.5) / static_cast<double>(c));
}

double StrengthDistribution::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile must be in [0, 1]");
  double h = q * static_cast<double>(total_ - 1);
  auto lo = static_cast<std::uint64_t>(std::floor(h));
  double frac = h - static_cast<double>(lo);
  double a = order_statistic(lo);
  if (frac == 0.0 || lo + 1 >= total_) return a;
  double b = order_statistic(lo + 1);
  return a + frac * (b - a);
}

std::uint64_t StrengthDistribution::count_at_most(double bits) const {
  if (std::isnan(bits) || bits < 0.0) return 0;
  if (storage_ == Storage::exact) {
    auto it = std::upper_bound(values_.begin(), values_.end(), bits);
    auto k = static_cast<std::size_t>(it - values_.begin());
    return k == 0 ? 0 : cumulative_[k - 1];
  }
  if (std::isinf(bits)) return total_;
  double pos = bits / bin_width_;
  if (pos >= static_cast<double>(bins_.size())) return total_;
  auto b = static_cast<std::size_t>(std::floor(pos));
  std::uint64_t full = b == 0 ? 0 : cumulative_[b - 1];
  double c = static_cast<double>(bins_[b]);
  double partial = std::floor((pos - static_cast<double>(b)) * c + 0.5);
  partial = std::clamp(partial, 0.0, c);
  return full + static_cast<std::uint64_t>(partial);
}

double StrengthDistribution::mean() const {
  long double sum = 0;
  if (storage_ == Storage::exact) {
    std::uint64_t prev = 0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      sum += static_cast<long double>(values_[k]) * (cumulative_[k] - prev);
      prev = cumulative_[k];
    }
  } else {
    for (std::size_t b = 0; b < bins_.size(); ++b) {
      sum += (static_cast<long double>(b) + 0.5L) * bin_width_ * bins_[b];
    }
  }
  return static_cast<double>(sum / total_);
}

double StrengthDistribution::stddev() const {
  const long double mu = mean();
  long double ss = 0;
  if (storage_ == Storage::exact) {
    std::uint64_t prev = 0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      long double d = values_[k] - mu;
      ss += d * d * (cumulative_[k] - prev);
      prev = cumulative_[k];
    }
  } else {
    const long double w = bin_width_;
    for (std::size_t b = 0; b < bins_.size(); ++b) {
      if (bins_[b] == 0) continue;
      long double c = bins_[b];
      long double d = (b + 0.5L) * w - mu;
      // Spread of the c evenly spaced representatives inside the bin.
      long double within = w * w * (c * c - 1) / (12 * c * c);
      ss += c * (d * d + within);
    }
  }
  return static_cast<double>(std::sqrt(ss / total_));
}

StrengthDistribution StrengthDistribution::to_histogram(double bin_width) const {
  check_bin_width(bin_width);
  if (storage_ == Storage::histogram && bin_width == bin_width_) return *this;
  if (storage_ == Storage::histogram) {
    throw DomainError("re-binning a histogram is not supported");
  }
  std::vector<std::uint64_t> counts;
  std::uint64_t prev = 0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    std::size_t b = bin_index(values_[k], bin_width);
    if (b >= counts.size()) counts.resize(b + 1, 0);
    counts[b] += cumulative_[k] - prev;
    prev = cumulative_[k];
  }
  return histogram_bins(bin_width, std::move(counts));
}

StrengthDistribution build_distribution(std::span<const PasswordRecord> records, Storage storage,
                                        double bin_width) {
  if (records.empty()) throw EmptyCorpusError("no records to build a distribution from");
  std::vector<double> strengths;
  strengths.reserve(records.size());
  for (const auto& r : records) strengths.push_back(r.strength_bits);
  if (storage == Storage::histogram) return StrengthDistribution::histogram(strengths, bin_width);
  return StrengthDistribution::exact(std::move(strengths));
}

StrengthDistribution synthesize_doubled(const StrengthDistribution& d) {
  StrengthDistribution out = d;
  if (d.storage_ == Storage::exact) {
    for (double& v : out.values_) v *= 2.0;
  } else {
    out.bin_width_ = d.bin_width_ * 2.0;
  }
  return out;
}

CorpusStats summarize(const StrengthDistribution& d) {
  CorpusStats s;
  s.count = d.total_count();
  s.mean_bits = d.mean();
  s.median_bits = d.quantile(0.5);
  s.stddev_bits = d.stddev();
  s.q1_bits = d.quantile(0.25);
  s.q3_bits = d.quantile(0.75);
  return s;
}

CorpusStats summarize(std::span<const PasswordRecord> records) {
  CorpusStats s = summarize(build_distribution(records));
  std::vector<double> lengths;
  lengths.reserve(records.size());
  for (const auto& r : records) lengths.push_back(static_cast<double>(text::utf8_length(r.password)));
  auto ld = StrengthDistribution::exact(std::move(lengths));
  s.length = LengthStats{ld.mean(), ld.quantile(0.5), ld.stddev()};
  return s;
}

void write_distribution_csv(std::ostream& out, const StrengthDistribution& d, double bin_width) {
  const auto hist = d.storage() == Storage::histogram ? d : d.to_histogram(bin_width);
  out << "bin_lower_bits,count\n";
  const auto bins = hist.bins();
  for (std::size_t b = 0; b < bins.size(); ++b) {
    out << fmt::format("{:.10g},{}\n", static_cast<double>(b) * hist.bin_width(), bins[b]);
  }
}

void write_stats_csv(std::ostream& out, const std::string& dataset, const CorpusStats& s) {
  out << "dataset,count,mean_bits,median_bits,stddev_bits,q1_bits,q3_bits,mean_length,median_length,stddev_length\n";
  out << csv::escape(dataset) << ',' << s.count << ',' << fmt::format("{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}", s.mean_bits, s.median_bits, s.stddev_bits, s.q1_bits, s.q3_bits);
  if (s.length) {
    out << fmt::format(",{:.6f},{:.6f},{:.6f}\n", s.length->mean, s.length->median, s.length->stddev);
  } else {
    out << ",,,\n";
  }
}

}  // namespace hashecon::corpus
