#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "hashecon/common/csv.hpp"
#include "hashecon/econcost.hpp"

namespace hashecon::cli {

namespace {

constexpr const char* kDefaultConfigs = "sha256,argon2id:47104,argon2id:2097152";

struct CostArgs {
  std::string market;
  std::string overhead;
  std::string configs;
  std::string cpu_profiles;
  std::string kwh_price;
  CLI::Option* market_opt = nullptr;
  CLI::Option* overhead_opt = nullptr;
  CLI::Option* configs_opt = nullptr;
  CLI::Option* cpu_opt = nullptr;
  CLI::Option* kwh_opt = nullptr;
};

std::string sci(double v) { return fmt::format("{:.6e}", v); }

}  // namespace

Action register_cost(CLI::App& app, Context& ctx) {
  auto* sub = app.add_subcommand("cost", "Per-hash attacker cost for each hash configuration");
  auto a = std::make_shared<CostArgs>();
  a->market_opt = sub->add_option("--market", a->market, "mining market snapshot CSV");
  a->overhead_opt = sub->add_option("--overhead", a->overhead, "RandomX overhead over pure Argon2 (default 100)");
  a->configs_opt = sub->add_option("--configs", a->configs, "comma list: sha256 | argon2id:<KiB>[:<t>[:<p>]]");
  a->cpu_opt = sub->add_option("--cpu-profiles", a->cpu_profiles, "CPU profiles for the energy cross-check");
  a->kwh_opt = sub->add_option("--kwh-price", a->kwh_price, "electricity price in USD/kWh (default 0.05)");

  return [a, &ctx] {
    const auto market = ctx.path_setting("market", given(a->market_opt), a->market,
                                         ctx.data_file("market_2025-02-20.csv").string());
    ctx.cfg.track_file(market);
    const double overhead = number("overhead", ctx.setting("overhead", given(a->overhead_opt), a->overhead, "100"));
    const auto specs = split_list(ctx.setting("configs", given(a->configs_opt), a->configs, kDefaultConfigs));
    if (specs.empty()) throw UsageError("no hash configurations given");
    const auto cpu = ctx.path_setting("cpu_profiles", given(a->cpu_opt), a->cpu_profiles,
                                      ctx.data_file("cpu_profiles.csv").string());
    ctx.cfg.track_file(cpu);
    const double kwh = number("kwh_price", ctx.setting("kwh_price", given(a->kwh_opt), a->kwh_price, "0.05"));

    auto snapshot = econcost::MarketSnapshot::load(market);
    auto book = econcost::CostBook::from_markets(snapshot, overhead);

    std::ostringstream costs;
    costs << "config,algorithm,memory_kib,t,p,usd_per_hash,provenance\n";
    for (const auto& spec : specs) {
      auto cfg = econcost::parse_hash_config(spec);
      auto m = book.cost_for(cfg);
      costs << fmt::format("{},{},{},{},{},{},{}\n", csv::escape(cfg.label()), econcost::to_string(cfg.algorithm), cfg.memory_kib,
                           cfg.iterations, cfg.parallelism, sci(m.usd_per_hash), econcost::to_string(m.provenance));
      ctx.out << fmt::format("{:<32} {} USD/hash\n", cfg.label(), sci(m.usd_per_hash));
    }
    ctx.emit("cost", "cost", costs.str());

    std::ostringstream markets;
    markets << "coin,observed_at,usd_per_hash\n";
    for (const auto& mk : snapshot.markets()) {
      markets << fmt::format("{},{},{}\n", mk.coin, mk.observed_at, sci(econcost::mining_cost_per_hash(mk)));
    }
    ctx.emit("cost", "market_costs", markets.str());

    std::ostringstream energy;
    energy << "profile,tdp_watts,hashes_per_second,usd_per_kwh,usd_per_hash,mining_proxy_usd_per_hash\n";
    for (const auto& p : econcost::load_cpu_profiles(cpu)) {
      energy << fmt::format("{},{},{},{},{},{}\n", p.name, p.tdp_watts, p.hashes_per_second, kwh,
                            sci(econcost::energy_cost_per_hash(p.tdp_watts, p.hashes_per_second, kwh)),
                            sci(book.argon2_base_cost()));
    }
    ctx.emit("cost", "energy_check", energy.str());
  };
}

}  // namespace hashecon::cli
