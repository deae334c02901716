#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hashecon::stats {

struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::uint64_t>> counts;  // counts[row][col]

  std::size_t rows() const noexcept { return counts.size(); }
  std::size_t cols() const noexcept { return counts.empty() ? 0 : counts.front().size(); }
  std::uint64_t row_total(std::size_t r) const;
  std::uint64_t col_total(std::size_t c) const;
  std::uint64_t total() const;

  /// Throws DomainError when the shape disagrees with the labels or rows are ragged.
  void validate() const;

  /// First header cell is a corner label; each row is `label,count,count,...`.
  static ContingencyTable read_csv(const std::filesystem::path& path);
  static ContingencyTable parse_csv(std::string_view text, std::string source = "<memory>");
  void write_csv(std::ostream& out, std::string_view corner = "") const;
};

struct TestResult {
  std::string method;
  double statistic = 0;
  std::optional<int> df;  // absent for Dunn z
  double p_value = 1;
  std::vector<std::string> warnings;
};

/// Upper tail of the chi-square distribution, Q(df/2, x/2).
double chi2_sf(double x, int df);
/// Upper tail of the standard normal.
double normal_sf(double z);
/// Regularized upper incomplete gamma Q(a, x): series below a + 1, Lentz continued fraction above.
double regularized_gamma_q(double a, double x);

/// Uniform expected counts.
TestResult chi2_gof(std::span<const std::uint64_t> observed);
TestResult chi2_gof(std::span<const std::uint64_t> observed, std::span<const double> expected);

/// Pearson statistic with E_ij = row_i * col_j / N; no continuity correction.
/// Cells with E < 5 add a warning.
TestResult chi2_independence(const ContingencyTable& table);

/// H with average ranks and the tie-correction divisor; df = k - 1.
TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

enum class Adjustment { none, bonferroni, holm };
Adjustment parse_adjustment(std::string_view name);

/// Dunn's z for groups i and j from mean ranks over the pooled sample, two-sided
/// p = 2 * (1 - Phi(|z|)). Bonferroni and Holm adjust over all k(k-1)/2 pairs.
TestResult dunn_pairwise(std::span<const std::vector<double>> groups, std::size_t i, std::size_t j,
                         Adjustment adjustment = Adjustment::none);

struct DunnPair {
  std::size_t i = 0;
  std::size_t j = 0;
  TestResult result;
};
std::vector<DunnPair> dunn_all_pairs(std::span<const std::vector<double>> groups,
                                     Adjustment adjustment = Adjustment::none);

/// Average ranks (1-based) of `values`; tie_term receives sum(t^3 - t) over tie groups.
std::vector<double> average_ranks(std::span<const double> values, double* tie_term = nullptr);

void write_results_csv(std::ostream& out, std::span<const TestResult> results);

}  // namespace hashecon::stats
