#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hashecon/attacksim.hpp"
#include "hashecon/common/error.hpp"

using namespace hashecon;
using namespace hashecon::attacksim;
using corpus::StrengthDistribution;

namespace {

// floor(budget / cost) from the exact binary expansions, written independently of the library.
GuessCount oracle_guesses(double budget, double cost) {
  int eb = 0, ec = 0;
  double fb = std::frexp(budget, &eb), fc = std::frexp(cost, &ec);
  GuessCount mb(static_cast<long long>(std::ldexp(fb, 53)));
  GuessCount mc(static_cast<long long>(std::ldexp(fc, 53)));
  int shift = eb - ec;
  if (shift >= 0) return (mb << shift) / mc;
  return mb / (mc << -shift);
}

double oracle_rate(const std::vector<double>& v, const GuessCount& g) {
  if (g == 0) return 0.0;
  // Inclusive rule: cracked iff 2^s <= G, evaluated in log space with the guard band.
  long double lg = std::log2(static_cast<long double>(g));
  auto n = std::count_if(v.begin(), v.end(), [&](double s) { return s <= lg + kThresholdGuardBits; });
  return static_cast<double>(n) / static_cast<double>(v.size());
}

}  // namespace

TEST(Guesses, Vectors) {
  EXPECT_EQ(affordable_guesses(1.0, 2.729e-12), GuessCount("366434591425"));
  EXPECT_NEAR(threshold_bits(affordable_guesses(1.0, 2.729e-12)), 38.41, 0.01);
  EXPECT_EQ(affordable_guesses(0.0, 2.729e-12), 0);
  auto big = affordable_guesses(0.10, 7.079e-19);
  EXPECT_NEAR(static_cast<double>(big) / 1.4126e17, 1.0, 1e-4);
  EXPECT_NEAR(threshold_bits(big), 56.97, 0.01);
  EXPECT_THROW(affordable_guesses(1.0, 0.0), DomainError);
  EXPECT_THROW(affordable_guesses(-1.0, 1e-3), DomainError);
  EXPECT_TRUE(std::isinf(threshold_bits(0)));
}

TEST(Guesses, ExactBeyondDoublePrecision) {
  auto g = affordable_guesses(20.0, 7.079e-19);
  EXPECT_GT(g, GuessCount(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_EQ(g, oracle_guesses(20.0, 7.079e-19));
}

TEST(Guesses, MatchOracleAndMonotone) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lb(-3, 3), lc(-20, -8);
  for (int i = 0; i < 1000; ++i) {
    double b = std::pow(10, lb(rng)), c = std::pow(10, lc(rng));
    auto g = affordable_guesses(b, c);
    EXPECT_EQ(g, oracle_guesses(b, c));
    EXPECT_GE(affordable_guesses(b * 1.5, c), g);
    EXPECT_LE(affordable_guesses(b, c * 1.5), g);
    if (g > 0 && g < (GuessCount(1) << 52)) {
      EXPECT_NEAR(threshold_bits(g), std::log2(static_cast<double>(g)), 1e-9);
    }
  }
}

TEST(CompromiseRate, InclusiveBoundary) {
  auto d = StrengthDistribution::exact(std::vector<double>(5, 10.0));
  EXPECT_EQ(compromise_rate(d, GuessCount(1) << 11), 1.0);
  EXPECT_EQ(compromise_rate(d, GuessCount(1) << 10), 1.0);
  EXPECT_EQ(compromise_rate(d, GuessCount(1) << 9), 0.0);
  EXPECT_EQ(compromise_rate(d, 1023), 0.0);
  EXPECT_EQ(compromise_rate(d, 0), 0.0);
}

TEST(CompromiseRate, MatchesBruteForce) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> size(1, 10000);
  std::gamma_distribution<double> strength(5.0, 4.5);
  std::uniform_int_distribution<int> bits(0, 80);
  for (int corpus_i = 0; corpus_i < 30; ++corpus_i) {
    std::vector<double> v(size(rng));
    for (auto& s : v) s = corpus_i % 2 ? std::round(strength(rng)) : strength(rng);
    auto d = StrengthDistribution::exact(v);
    for (int k = 0; k < 20; ++k) {
      GuessCount g = GuessCount(1) << bits(rng);
      if (k % 2) g += static_cast<long long>(rng() % 1000);
      EXPECT_EQ(compromise_rate(d, g), oracle_rate(v, g));
    }
  }
}

TEST(CompromiseRate, MonotoneInGuesses) {
  auto d = StrengthDistribution::exact({1, 5, 9, 13, 17, 21, 25});
  double prev = 0;
  for (int b = 0; b < 30; ++b) {
    double r = compromise_rate(d, GuessCount(1) << b);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(Doubling, RateEqualsSquareRootGuesses) {
  std::mt19937_64 rng(77);
  std::gamma_distribution<double> strength(5.0, 4.5);
  std::uniform_int_distribution<std::uint64_t> root(1, std::uint64_t{1} << 40);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> v(2000);
    for (auto& s : v) s = trial % 2 ? std::round(strength(rng)) : strength(rng);
    auto d = StrengthDistribution::exact(v);
    auto dd = corpus::synthesize_doubled(d);
    for (int k = 0; k < 100; ++k) {
      GuessCount r = k % 3 == 0 ? GuessCount(1) << (rng() % 40) : GuessCount(root(rng));
      EXPECT_EQ(compromise_rate(dd, r * r), compromise_rate(d, r));
    }
  }
}

TEST(Simulate, MatrixOrderAndComposition) {
  auto d = StrengthDistribution::exact({10, 20, 30, 40, 50});
  std::vector<NamedDistribution> dists{{"orig", d}, {"doubled", corpus::synthesize_doubled(d)}};
  std::vector<econcost::HashConfig> configs{econcost::HashConfig::sha256(), econcost::HashConfig::argon2id(47104)};
  std::vector<BudgetScenario> budgets{BudgetScenario::make(0.1), BudgetScenario::make(1), BudgetScenario::make(20)};
  econcost::CostBook book(7.079e-19, 2.729e-12);
  auto rows = simulate_matrix(dists, configs, budgets, book, 4);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].dataset, "orig");
  EXPECT_EQ(rows[6].dataset, "doubled");
  EXPECT_EQ(rows[3].config, configs[1]);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    EXPECT_EQ(r.guesses, affordable_guesses(r.budget.usd_per_account, r.usd_per_hash));
    EXPECT_EQ(r.compromise_rate, compromise_rate(dists[i / 6].distribution, r.guesses));
    if (i % 3) EXPECT_GE(r.compromise_rate, rows[i - 1].compromise_rate);
  }
  auto serial = simulate_matrix(dists, configs, budgets, book, 1);
  std::ostringstream a, b;
  write_results_csv(a, rows);
  write_results_csv(b, serial);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "dataset,algorithm,memory_kib,t,budget_usd,guesses,threshold_bits,compromise_rate");
  EXPECT_THROW(BudgetScenario::make(-1), DomainError);
  EXPECT_EQ(BudgetScenario::make(0).usd_per_account, 0.0);
}

TEST(Simulate, DiminishingReturns) {
  std::vector<double> v;
  for (int i = 0; i < 4000; ++i) v.push_back(20 + 15 * std::sin(i * 0.7) * std::sin(i * 0.013));
  auto d = StrengthDistribution::exact(v);
  auto gap = [&](double budget) {
    return compromise_rate(d, affordable_guesses(budget, 7.079e-19)) -
           compromise_rate(d, affordable_guesses(budget, 2.729e-12));
  };
  EXPECT_LE(gap(100 * 1e-6), gap(1e-6) + 1e-12);
}

TEST(Simulate, BudgetGrid) {
  auto g = log_budget_grid();
  ASSERT_EQ(g.size(), 50u);
  EXPECT_NEAR(g.front().usd_per_account, 1e-3, 1e-15);
  EXPECT_NEAR(g.back().usd_per_account, 1e3, 1e-9);
  EXPECT_NEAR(g[1].usd_per_account / g[0].usd_per_account, g[2].usd_per_account / g[1].usd_per_account, 1e-9);
}
