#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hashecon::config {

/// Key/value settings for one run. Lookup order: explicit overrides (command-line
/// flags), then HASHECON_<KEY> environment variables, then the config file.
class RunConfig {
 public:
  RunConfig() = default;

  /// `key = value` lines; `#` starts a comment, blank lines are ignored.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(std::string_view text, const std::string& source = "<memory>");

  void set(const std::string& key, std::string value);
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  std::optional<double> get_double(const std::string& key) const;

  /// Hash only the file name of this key's value, so moving a checkout keeps the hash.
  void mark_path(const std::string& key);

  /// Adds an input file whose contents are part of the snapshot (market data, anchors, ...).
  void track_file(const std::filesystem::path& path);

  /// Every key that has a value from any layer, resolved.
  std::map<std::string, std::string> resolved() const;
  /// FNV-1a over the resolved settings and the tracked files' names and contents.
  std::string snapshot_hash() const;
  /// `# hashecon <version> command=<command> config=<hash>`
  std::string header_line(std::string_view command) const;

 private:
  std::map<std::string, std::string> file_;
  std::map<std::string, std::string> overrides_;
  std::vector<std::filesystem::path> tracked_;
  std::set<std::string> path_keys_;
};

std::string env_name(std::string_view key);

}  // namespace hashecon::config
