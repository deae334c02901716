#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "hashecon/common/csv.hpp"
#include "hashecon/common/text.hpp"

namespace hashecon::cli {

std::string Context::setting(const std::string& key, bool is_given, const std::string& flag_value,
                             const std::string& fallback) {
  if (is_given) cfg.set(key, flag_value);
  auto v = cfg.get(key);
  if (v) return *v;
  cfg.set(key, fallback);
  return fallback;
}

std::filesystem::path Context::path_setting(const std::string& key, bool is_given, const std::string& flag_value,
                                           const std::string& fallback) {
  cfg.mark_path(key);
  return setting(key, is_given, flag_value, fallback);
}

void Context::emit(std::string_view command, const std::string& name, const std::string& csv_body) {
  std::filesystem::create_directories(out_dir);
  const bool json = format == "json";
  const auto path = out_dir / (name + (json ? ".json" : ".csv"));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(fmt::format("cannot write {}", path.string()));
  if (json) {
    f << csv_to_json(csv_body, command, cfg.snapshot_hash());
  } else {
    f << cfg.header_line(command) << '\n' << csv_body;
  }
  if (!f) throw IoError(fmt::format("short write to {}", path.string()));
  written.push_back(path);
}

void Context::log(std::string_view line) {
  std::lock_guard lock(log_mu_);
  err << line << '\n';
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  while (!s.empty()) {
    auto pos = s.find(sep);
    auto item = text::trim(s.substr(0, pos));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

double number(std::string_view key, const std::string& value) {
  double d = 0;
  auto v = text::trim(value);
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw UsageError(fmt::format("--{} expects a number, got '{}'", key, value));
  }
  return d;
}

std::vector<double> number_list(std::string_view key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(number(key, item));
  return out;
}

namespace {

nlohmann::ordered_json cell(const std::string& v) {
  if (v.empty()) return nullptr;
  // Long integers (guess counts) stay strings so no precision is lost.
  const bool integral = v.find_first_not_of("-0123456789") == std::string::npos;
  if (integral && v.size() > 15) return v;
  double d = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ec == std::errc() && p == v.data() + v.size()) {
    if (integral) return std::stoll(v);
    return d;
  }
  return v;
}

}  // namespace

std::string csv_to_json(const std::string& csv_body, std::string_view command, const std::string& config_hash) {
  auto t = csv::parse(csv_body, "<output>");
  nlohmann::ordered_json j;
  j["generator"] = fmt::format("hashecon {}", HASHECON_VERSION);
  j["command"] = std::string(command);
  j["config"] = config_hash;
  j["columns"] = t.header;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (std::size_t c = 0; c < row.size(); ++c) r[t.header[c]] = cell(row[c]);
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  CLI::App app{"Password-hashing economics and Argon2 adoption analysis", "hashecon"};
  app.set_version_flag("--version", std::string(HASHECON_VERSION));
  app.require_subcommand(1);

  std::string config_file, out_dir = ".", format = "csv", data_dir = HASHECON_DATA_DIR;
  app.add_option("--config", config_file, "key = value settings file")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "directory for output files");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
  auto* data_opt = app.add_option("--data-dir", data_dir, "directory with the bundled reference data");

  std::map<CLI::App*, Action> actions;
  auto add = [&](Action (*reg)(CLI::App&, Context&)) {
    auto before = app.get_subcommands({}).size();
    Action a = reg(app, ctx);
    actions[app.get_subcommands({}).at(before)] = std::move(a);
  };
  add(register_cost);
  add(register_simulate);
  add(register_classify);
  add(register_scan);
  add(register_analyze);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (!config_file.empty()) ctx.cfg = config::RunConfig::load(config_file);
    ctx.out_dir = out_dir;
    ctx.format = format;
    ctx.data_dir = ctx.path_setting("data_dir", given(data_opt), data_dir, HASHECON_DATA_DIR);
    for (auto& [sub, action] : actions) {
      if (sub->parsed()) action();
    }
    for (const auto& p : ctx.written) out << "wrote " << p.string() << '\n';
    return kOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const RateLimitError& e) {
    err << "rate limited: " << e.what() << "\nresume token: " << e.resume_token() << '\n';
    return kNetwork;
  } catch (const NetworkError& e) {
    err << "network error: " << e.what() << '\n';
    return kNetwork;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace hashecon::cli
