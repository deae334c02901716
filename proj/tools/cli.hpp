#pragma once

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hashecon/common/error.hpp"
#include "hashecon/config.hpp"

namespace hashecon::cli {

enum ExitCode { kOk = 0, kUsage = 2, kInput = 3, kNetwork = 4, kInternal = 5 };

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Context {
  config::RunConfig cfg;
  std::filesystem::path out_dir = ".";
  std::string format = "csv";
  std::filesystem::path data_dir;
  std::ostream& out;
  std::ostream& err;

  Context(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  /// Setting from a flag (when `given`), else the config file/environment, else `fallback`.
  std::string setting(const std::string& key, bool given, const std::string& flag_value,
                      const std::string& fallback);
  /// Same as setting(), for values naming files or directories.
  std::filesystem::path path_setting(const std::string& key, bool given, const std::string& flag_value,
                                     const std::string& fallback);
  std::filesystem::path data_file(const std::string& name) const { return data_dir / name; }

  /// Writes `<out_dir>/<name>.csv` (or .json) with the run header. `csv_body` is the
  /// CSV text including its column header.
  void emit(std::string_view command, const std::string& name, const std::string& csv_body);
  void log(std::string_view line);

  std::vector<std::filesystem::path> written;

 private:
  std::mutex log_mu_;
};

/// Parses a numeric setting; UsageError names the key on failure.
double number(std::string_view key, const std::string& value);
std::vector<double> number_list(std::string_view key, const std::string& value);

std::vector<std::string> split_list(std::string_view s, char sep = ',');
/// Converts CSV text into the JSON output form: {"generator","command","config","columns","rows"}.
std::string csv_to_json(const std::string& csv_body, std::string_view command, const std::string& config_hash);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hashecon::cli
