#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hashecon/corpus.hpp"
#include "hashecon/econcost.hpp"

namespace hashecon::attacksim {

/// Guess counts overflow 64 bits for cheap hashes ($20 / 7e-19 ~ 2.8e19).
using GuessCount = boost::multiprecision::cpp_int;

/// Slack when comparing a strength against log2(guesses).
inline constexpr double kThresholdGuardBits = 1e-9;

struct BudgetScenario {
  double usd_per_account = 0;
  std::string label;

  /// A zero budget is allowed and affords no guesses.
  static BudgetScenario make(double usd, std::string label = {});
};

struct NamedDistribution {
  std::string name;
  corpus::StrengthDistribution distribution;
};

struct AttackResult {
  std::string dataset;
  econcost::HashConfig config;
  BudgetScenario budget;
  double usd_per_hash = 0;
  GuessCount guesses;
  double threshold_bits = 0;  // log2(guesses); -inf when guesses == 0
  double compromise_rate = 0;
};

/// floor(budget / cost), computed exactly from the binary expansions of both doubles.
GuessCount affordable_guesses(double budget_usd, double usd_per_hash);

double threshold_bits(const GuessCount& guesses);

/// Fraction of members with strength <= log2(guesses) (inclusive, guarded). 0 for 0 guesses.
double compromise_rate(const corpus::StrengthDistribution& d, const GuessCount& guesses);
double compromise_rate_at_threshold(const corpus::StrengthDistribution& d, double threshold_bits);

/// One row per (distribution, config, budget), distribution-major then config then budget.
/// Cells are evaluated on `threads` workers (0 = hardware concurrency); the output order
/// does not depend on scheduling.
std::vector<AttackResult> simulate_matrix(std::span<const NamedDistribution> distributions,
                                          std::span<const econcost::HashConfig> configs,
                                          std::span<const BudgetScenario> budgets,
                                          const econcost::CostBook& costs, unsigned threads = 0);

/// `points` budgets spaced log-uniformly over [min_usd, max_usd].
std::vector<BudgetScenario> log_budget_grid(double min_usd = 1e-3, double max_usd = 1e3, std::size_t points = 50);

void write_results_csv(std::ostream& out, std::span<const AttackResult> rows);
void write_results_json(std::ostream& out, std::span<const AttackResult> rows);

}  // namespace hashecon::attacksim
