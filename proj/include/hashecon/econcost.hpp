#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hashecon::econcost {

enum class Algorithm { sha256, argon2id };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Memory of one RandomX-sized Argon2 computation (2 GiB), the reference point
/// the mining-proxy base cost refers to.
inline constexpr std::uint64_t kReferenceMemoryKib = 2'097'152;

struct HashConfig {
  Algorithm algorithm = Algorithm::sha256;
  std::uint64_t memory_kib = 0;  // Argon2 only
  std::uint32_t iterations = 1;
  std::uint32_t parallelism = 1;

  static HashConfig sha256() { return HashConfig{}; }
  static HashConfig argon2id(std::uint64_t memory_kib, std::uint32_t iterations = 1, std::uint32_t parallelism = 1);

  /// Throws DomainError unless t, p >= 1 and memory_kib >= 8 * p (Argon2 only).
  void validate() const;
  /// "sha256" or "argon2id:m=47104,t=1,p=1"
  std::string label() const;

  friend bool operator==(const HashConfig&, const HashConfig&) = default;
};

/// Parses "sha256" or "argon2id:<memory_kib>[:<t>[:<p>]]".
HashConfig parse_hash_config(std::string_view spec);

struct MiningMarket {
  std::string coin;
  double network_hashrate = 0;  // hashes per second
  double blocks_per_hour = 0;
  double block_reward_units = 0;  // coins per block
  double unit_price_usd = 0;
  std::string observed_at;  // ISO date
};

enum class CostProvenance { mining_proxy, energy, manual };
std::string_view to_string(CostProvenance p);

struct CostModel {
  double usd_per_hash = 0;
  CostProvenance provenance = CostProvenance::manual;
  HashConfig config;
};

/// Network revenue per hash: blocks/h * reward * price / (hashrate * 3600).
double mining_cost_per_hash(const MiningMarket& market);

/// Cost of one 2-GiB Argon2 evaluation: RandomX cost / overhead_factor.
double argon2_base_cost(double randomx_cost, double overhead_factor);

/// base * (memory_kib / 2 GiB) * t. Parallelism does not change total work.
double scale_argon2_cost(double base_2gib_cost, const HashConfig& config);

/// tdp_watts / (hashes_per_second * 3.6e6) * usd_per_kwh
double energy_cost_per_hash(double tdp_watts, double hashes_per_second, double usd_per_kwh);

/// Market observations keyed by coin, loaded from
/// `coin,hashrate_hs,blocks_per_hour,reward_units,unit_price_usd,observed_at`.
class MarketSnapshot {
 public:
  static MarketSnapshot load(const std::filesystem::path& path);
  explicit MarketSnapshot(std::vector<MiningMarket> markets);

  const MiningMarket& get(std::string_view coin) const;
  const std::vector<MiningMarket>& markets() const noexcept { return markets_; }

 private:
  std::vector<MiningMarket> markets_;
};

struct CpuProfile {
  std::string name;
  double tdp_watts = 0;
  double hashes_per_second = 0;
};

/// `name,tdp_watts,hashes_per_second`
std::vector<CpuProfile> load_cpu_profiles(const std::filesystem::path& path);

/// Resolves a per-hash cost for any configuration from the SHA-256 cost and the
/// 2-GiB Argon2 base cost.
class CostBook {
 public:
  CostBook(double sha256_usd_per_hash, double argon2_base_usd_per_hash,
           CostProvenance provenance = CostProvenance::mining_proxy);

  /// SHA-256 from `sha_coin`, Argon2 base from `memory_hard_coin` / overhead_factor.
  static CostBook from_markets(const MarketSnapshot& snapshot, double overhead_factor,
                               std::string_view sha_coin = "bitcoin",
                               std::string_view memory_hard_coin = "monero");

  CostModel cost_for(const HashConfig& config) const;
  double sha256_cost() const noexcept { return sha256_; }
  double argon2_base_cost() const noexcept { return argon2_base_; }

 private:
  double sha256_;
  double argon2_base_;
  CostProvenance provenance_;
};

}  // namespace hashecon::econcost
