#include "hashecon/attacksim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"

namespace hashecon::attacksim {

namespace mp = boost::multiprecision;

namespace {

// v = mantissa * 2^exponent with an integral 53-bit mantissa.
std::pair<GuessCount, int> binary_expansion(double v) {
  int exp = 0;
  double frac = std::frexp(v, &exp);
  auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  return {GuessCount(mantissa), exp - 53};
}

}  // namespace

BudgetScenario BudgetScenario::make(double usd, std::string label) {
  if (!(usd >= 0.0) || !std::isfinite(usd)) throw DomainError(fmt::format("budget must be >= 0, got {}", usd));
  if (label.empty()) label = fmt::format("${}", csv::format_double(usd));
  return BudgetScenario{usd, std::move(label)};
}

GuessCount affordable_guesses(double budget_usd, double usd_per_hash) {
  if (!(usd_per_hash > 0.0) || !std::isfinite(usd_per_hash)) {
    throw DomainError(fmt::format("cost per hash must be positive, got {}", usd_per_hash));
  }
  if (!(budget_usd >= 0.0) || !std::isfinite(budget_usd)) {
    throw DomainError(fmt::format("budget must be >= 0, got {}", budget_usd));
  }
  if (budget_usd == 0.0) return GuessCount(0);
  auto [bm, be] = binary_expansion(budget_usd);
  auto [cm, ce] = binary_expansion(usd_per_hash);
  const int shift = be - ce;
  if (shift >= 0) return (bm << shift) / cm;
  return bm / (cm << -shift);
}

double threshold_bits(const GuessCount& guesses) {
  if (guesses <= 0) return -std::numeric_limits<double>::infinity();
  // msb + log2 of the leading 53 bits stays accurate far beyond double range.
  const auto msb = static_cast<int>(mp::msb(guesses));
  if (msb < 53) return std::log2(guesses.convert_to<double>());
  GuessCount top = guesses >> (msb - 52);
  return std::log2(top.convert_to<double>()) + (msb - 52);
}

double compromise_rate_at_threshold(const corpus::StrengthDistribution& d, double bits) {
  if (std::isinf(bits) && bits < 0) return 0.0;
  auto hit = d.count_at_most(bits + kThresholdGuardBits);
  return static_cast<double>(hit) / static_cast<double>(d.total_count());
}

double compromise_rate(const corpus::StrengthDistribution& d, const GuessCount& guesses) {
  if (guesses <= 0) return 0.0;
  return compromise_rate_at_threshold(d, threshold_bits(guesses));
}

std::vector<AttackResult> simulate_matrix(std::span<const NamedDistribution> distributions,
                                          std::span<const econcost::HashConfig> configs,
                                          std::span<const BudgetScenario> budgets, const econcost::CostBook& costs,
                                          unsigned threads) {
  if (distributions.empty() || configs.empty() || budgets.empty()) {
    throw DomainError("simulate_matrix needs at least one distribution, config and budget");
  }
  // Resolve costs up front so domain errors surface before any work starts.
  std::vector<econcost::CostModel> models;
  for (const auto& c : configs) models.push_back(costs.cost_for(c));

  const std::size_t nc = configs.size(), nb = budgets.size();
  const std::size_t cells = distributions.size() * nc * nb;
  std::vector<AttackResult> rows(cells);

  auto fill = [&](std::size_t i) {
    const std::size_t di = i / (nc * nb), ci = (i / nb) % nc, bi = i % nb;
    AttackResult& r = rows[i];
    r.dataset = distributions[di].name;
    r.config = configs[ci];
    r.budget = budgets[bi];
    r.usd_per_hash = models[ci].usd_per_hash;
    r.guesses = affordable_guesses(budgets[bi].usd_per_account, r.usd_per_hash);
    r.threshold_bits = threshold_bits(r.guesses);
    r.compromise_rate = compromise_rate(distributions[di].distribution, r.guesses);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));
  if (threads <= 1) {
    for (std::size_t i = 0; i < cells; ++i) fill(i);
    return rows;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < cells; i += threads) fill(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::vector<BudgetScenario> log_budget_grid(double min_usd, double max_usd, std::size_t points) {
  if (!(min_usd > 0) || !(max_usd >= min_usd)) throw DomainError("budget grid needs 0 < min <= max");
  if (points == 0) throw DomainError("budget grid needs at least one point");
  std::vector<BudgetScenario> out;
  const double lo = std::log10(min_usd), hi = std::log10(max_usd);
  for (std::size_t i = 0; i < points; ++i) {
    double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    double usd = i + 1 == points ? max_usd : std::pow(10.0, lo + f * (hi - lo));
    if (i == 0) usd = min_usd;
    out.push_back(BudgetScenario::make(usd, fmt::format("grid{:02}", i)));
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const AttackResult> rows) {
  out << "dataset,algorithm,memory_kib,t,budget_usd,guesses,threshold_bits,compromise_rate\n";
  for (const auto& r : rows) {
    const bool argon = r.config.algorithm == econcost::Algorithm::argon2id;
    out << csv::escape(r.dataset) << ',' << econcost::to_string(r.config.algorithm) << ','
        << (argon ? std::to_string(r.config.memory_kib) : std::string()) << ','
        << (argon ? std::to_string(r.config.iterations) : std::string()) << ','
        << csv::format_double(r.budget.usd_per_account) << ',' << r.guesses.str() << ','
        << (r.guesses > 0 ? fmt::format("{:.6f}", r.threshold_bits) : std::string("-inf")) << ','
        << fmt::format("{:.6f}", r.compromise_rate) << '\n';
  }
}

void write_results_json(std::ostream& out, std::span<const AttackResult> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    const bool argon = r.config.algorithm == econcost::Algorithm::argon2id;
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["algorithm"] = econcost::to_string(r.config.algorithm);
    j["memory_kib"] = argon ? nlohmann::ordered_json(r.config.memory_kib) : nlohmann::ordered_json();
    j["t"] = argon ? nlohmann::ordered_json(r.config.iterations) : nlohmann::ordered_json();
    j["budget_usd"] = r.budget.usd_per_account;
    j["guesses"] = r.guesses.str();  // may exceed 64 bits
    j["threshold_bits"] = r.guesses > 0 ? nlohmann::ordered_json(r.threshold_bits) : nlohmann::ordered_json();
    j["compromise_rate"] = r.compromise_rate;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace hashecon::attacksim
