#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hashecon/corpus.hpp"

namespace hashecon::corpus {

/// Estimates log2 of a password's guess number. Implementations must be
/// thread-safe for concurrent const calls.
class StrengthEstimator {
 public:
  virtual ~StrengthEstimator() = default;
  virtual double estimate_bits(std::string_view password) const = 0;
  virtual std::string name() const = 0;
};

/// Character classes used by the brute-force fallback.
struct Charset {
  static constexpr int kLower = 26;
  static constexpr int kUpper = 26;
  static constexpr int kDigits = 10;
  static constexpr int kSymbols = 33;  // printable ASCII punctuation and space
  static constexpr int kNonAscii = 100;
};

int bruteforce_cardinality(std::u32string_view password);
/// log2(cardinality ^ length).
double bruteforce_bits(std::u32string_view password);

class BruteForceEstimator final : public StrengthEstimator {
 public:
  double estimate_bits(std::string_view password) const override;
  std::string name() const override { return "bruteforce"; }
};

/// Frequency-ranked word list; rank 1 is the most common entry. Lookup is on
/// ASCII-lowercased words.
class RankedDictionary {
 public:
  RankedDictionary() = default;
  explicit RankedDictionary(std::span<const std::string> words_by_rank);

  static RankedDictionary builtin();
  /// One word per line, most common first. Duplicates keep their first rank.
  static RankedDictionary load(const std::filesystem::path& path);

  std::uint64_t rank(std::string_view lowercase_word) const;  // 0 when absent
  std::size_t size() const noexcept { return ranks_.size(); }

 private:
  std::unordered_map<std::string, std::uint64_t> ranks_;
};

enum class PatternKind { dictionary, repeat, sequence, bruteforce };

struct PatternMatch {
  PatternKind kind = PatternKind::bruteforce;
  double bits = 0.0;  // log2 guesses
};

/// Whole-password pattern estimator: the guess number is the minimum over the
/// patterns that cover the entire password.
///
///  - dictionary: rank * uppercase_variations * l33t_variations
///  - repeat: unit repeated r >= 2 times, guesses(unit) * r
///  - sequence: constant step +-1 within one class, length >= 3,
///    base * length with base 4 for obvious starts (a A z Z 0 1 9), 10 for digits,
///    26 otherwise, doubled when descending
///  - bruteforce: cardinality ^ length
///
/// No segmentation into sub-tokens is attempted.
class PatternEstimator final : public StrengthEstimator {
 public:
  explicit PatternEstimator(RankedDictionary dictionary);
  static PatternEstimator builtin();

  double estimate_bits(std::string_view password) const override;
  std::string name() const override { return "pattern"; }

  PatternMatch best_match(std::u32string_view password) const;

  std::optional<double> dictionary_bits(std::u32string_view password) const;
  std::optional<double> repeat_bits(std::u32string_view password) const;
  static std::optional<double> sequence_bits(std::u32string_view password);

 private:
  RankedDictionary dictionary_;
};

/// log2 of zxcvbn-style case variations for a dictionary hit.
double uppercase_variation_bits(std::u32string_view word);

/// Looks passwords up in a precomputed table; unknown passwords fall back to brute force.
class PrecomputedEstimator final : public StrengthEstimator {
 public:
  explicit PrecomputedEstimator(std::span<const PasswordRecord> table);
  double estimate_bits(std::string_view password) const override;
  std::string name() const override { return "precomputed"; }

 private:
  std::unordered_map<std::string, double> table_;
};

/// Returns log2(guesses) for `password` under `estimator`.
double estimate_strength(std::string_view password, const StrengthEstimator& estimator);

/// Fills strength_bits for every record, splitting the work over `threads`
/// (0 = hardware concurrency). Output is independent of the thread count.
void estimate_all(std::span<PasswordRecord> records, const StrengthEstimator& estimator,
                  unsigned threads = 0);

std::unique_ptr<StrengthEstimator> make_estimator(std::string_view kind,
                                                  const std::filesystem::path& dictionary = {});

}  // namespace hashecon::corpus
