#pragma once

#include <functional>

#include "CLI11.hpp"
#include "cli.hpp"

namespace hashecon::cli {

using Action = std::function<void()>;

// Each registers a subcommand and returns the action to run once parsing is done.
Action register_cost(CLI::App& app, Context& ctx);
Action register_simulate(CLI::App& app, Context& ctx);
Action register_classify(CLI::App& app, Context& ctx);
Action register_scan(CLI::App& app, Context& ctx);
Action register_analyze(CLI::App& app, Context& ctx);

/// True when the option appeared on the command line.
inline bool given(const CLI::Option* o) { return o && o->count() > 0; }

}  // namespace hashecon::cli
