#include "hashecon/econcost.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "hashecon/common/csv.hpp"
#include "hashecon/common/error.hpp"

namespace hashecon::econcost {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(fmt::format("{} must be positive, got {}", what, v));
}

template <typename T>
T parse_unsigned(std::string_view s, std::string_view spec) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw DomainError(fmt::format("invalid number '{}' in hash config '{}'", s, spec));
  }
  return v;
}

}  // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::sha256 ? "sha256" : "argon2id"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "sha256" || name == "SHA256" || name == "sha-256") return Algorithm::sha256;
  if (name == "argon2id" || name == "ARGON2ID" || name == "argon2") return Algorithm::argon2id;
  throw DomainError(fmt::format("unknown algorithm '{}'", name));
}

std::string_view to_string(CostProvenance p) {
  switch (p) {
    case CostProvenance::mining_proxy: return "mining-proxy";
    case CostProvenance::energy: return "energy";
    case CostProvenance::manual: return "manual";
  }
  return "manual";
}

HashConfig HashConfig::argon2id(std::uint64_t memory_kib, std::uint32_t iterations, std::uint32_t parallelism) {
  HashConfig c{Algorithm::argon2id, memory_kib, iterations, parallelism};
  c.validate();
  return c;
}

void HashConfig::validate() const {
  if (algorithm == Algorithm::sha256) return;
  if (iterations < 1) throw DomainError("Argon2 iterations must be >= 1");
  if (parallelism < 1) throw DomainError("Argon2 parallelism must be >= 1");
  if (memory_kib < 8ULL * parallelism) {
    throw DomainError(fmt::format("Argon2 memory {} KiB is below the minimum 8*p = {} KiB", memory_kib,
                                  8ULL * parallelism));
  }
}

std::string HashConfig::label() const {
  if (algorithm == Algorithm::sha256) return "sha256";
  return fmt::format("argon2id:m={},t={},p={}", memory_kib, iterations, parallelism);
}

HashConfig parse_hash_config(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t colon = spec.find(':', pos);
    parts.push_back(spec.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  Algorithm alg = parse_algorithm(parts[0]);
  if (alg == Algorithm::sha256) {
    if (parts.size() != 1) throw DomainError(fmt::format("sha256 takes no parameters: '{}'", spec));
    return HashConfig::sha256();
  }
  if (parts.size() < 2 || parts.size() > 4) {
    throw DomainError(fmt::format("expected argon2id:<memory_kib>[:<t>[:<p>]], got '{}'", spec));
  }
  auto m = parse_unsigned<std::uint64_t>(parts[1], spec);
  auto t = parts.size() > 2 ? parse_unsigned<std::uint32_t>(parts[2], spec) : 1u;
  auto p = parts.size() > 3 ? parse_unsigned<std::uint32_t>(parts[3], spec) : 1u;
  return HashConfig::argon2id(m, t, p);
}

double mining_cost_per_hash(const MiningMarket& market) {
  require_positive(market.network_hashrate, "network hashrate");
  require_positive(market.blocks_per_hour, "blocks per hour");
  require_positive(market.block_reward_units, "block reward");
  // A zero price would make every budget buy unlimited guesses.
  require_positive(market.unit_price_usd, "unit price");
  double revenue_per_hour = market.blocks_per_hour * market.block_reward_units * market.unit_price_usd;
  return revenue_per_hour / (market.network_hashrate * 3600.0);
}

double argon2_base_cost(double randomx_cost, double overhead_factor) {
  require_positive(randomx_cost, "RandomX cost per hash");
  if (!(overhead_factor >= 1.0) || !std::isfinite(overhead_factor)) {
    throw DomainError(fmt::format("overhead factor must be >= 1, got {}", overhead_factor));
  }
  return randomx_cost / overhead_factor;
}

double scale_argon2_cost(double base_2gib_cost, const HashConfig& config) {
  if (config.algorithm != Algorithm::argon2id) {
    throw DomainError("scale_argon2_cost requires an Argon2id configuration");
  }
  require_positive(base_2gib_cost, "Argon2 base cost");
  config.validate();
  return base_2gib_cost * (static_cast<double>(config.memory_kib) / static_cast<double>(kReferenceMemoryKib)) *
         static_cast<double>(config.iterations);
}

double energy_cost_per_hash(double tdp_watts, double hashes_per_second, double usd_per_kwh) {
  require_positive(tdp_watts, "TDP");
  require_positive(hashes_per_second, "hash rate");
  if (!(usd_per_kwh >= 0.0)) throw DomainError("energy price must be >= 0");
  return tdp_watts / (hashes_per_second * 3.6e6) * usd_per_kwh;
}

MarketSnapshot::MarketSnapshot(std::vector<MiningMarket> markets) : markets_(std::move(markets)) {}

MarketSnapshot MarketSnapshot::load(const std::filesystem::path& path) {
  auto t = csv::read(path);
  const auto coin = t.column("coin"), rate = t.column("hashrate_hs"), bph = t.column("blocks_per_hour"),
             reward = t.column("reward_units"), price = t.column("unit_price_usd"), at = t.column("observed_at");
  std::vector<MiningMarket> markets;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    MiningMarket m{row[coin],
                   csv::to_double(row[rate], t, r),
                   csv::to_double(row[bph], t, r),
                   csv::to_double(row[reward], t, r),
                   csv::to_double(row[price], t, r),
                   row[at]};
    if (!(m.network_hashrate > 0)) throw ParseError(t.source, t.line_numbers[r], "hashrate must be positive");
    markets.push_back(std::move(m));
  }
  return MarketSnapshot(std::move(markets));
}

const MiningMarket& MarketSnapshot::get(std::string_view coin) const {
  for (const auto& m : markets_) {
    if (m.coin == coin) return m;
  }
  throw DomainError(fmt::format("market snapshot has no entry for '{}'", coin));
}

std::vector<CpuProfile> load_cpu_profiles(const std::filesystem::path& path) {
  auto t = csv::read(path);
  const auto name = t.column("name"), tdp = t.column("tdp_watts"), rate = t.column("hashes_per_second");
  std::vector<CpuProfile> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.push_back(CpuProfile{t.rows[r][name], csv::to_double(t.rows[r][tdp], t, r),
                             csv::to_double(t.rows[r][rate], t, r)});
  }
  return out;
}

CostBook::CostBook(double sha256_usd_per_hash, double argon2_base_usd_per_hash, CostProvenance provenance)
    : sha256_(sha256_usd_per_hash), argon2_base_(argon2_base_usd_per_hash), provenance_(provenance) {
  require_positive(sha256_, "SHA-256 cost per hash");
  require_positive(argon2_base_, "Argon2 base cost per hash");
}

CostBook CostBook::from_markets(const MarketSnapshot& snapshot, double overhead_factor, std::string_view sha_coin,
                                std::string_view memory_hard_coin) {
  double sha = mining_cost_per_hash(snapshot.get(sha_coin));
  double randomx = mining_cost_per_hash(snapshot.get(memory_hard_coin));
  return CostBook(sha, econcost::argon2_base_cost(randomx, overhead_factor), CostProvenance::mining_proxy);
}

CostModel CostBook::cost_for(const HashConfig& config) const {
  config.validate();
  if (config.algorithm == Algorithm::sha256) return CostModel{sha256_, provenance_, config};
  return CostModel{scale_argon2_cost(argon2_base_, config), provenance_, config};
}

}  // namespace hashecon::econcost
