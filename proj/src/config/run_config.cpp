#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/config.hpp"

namespace hashecon::config {

std::string env_name(std::string_view key) {
  std::string out = "HASHECON_";
  for (char c : key) out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : '_';
  return out;
}

RunConfig RunConfig::parse(std::string_view text, const std::string& source) {
  RunConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto t = text::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "expected key = value");
    auto key = text::trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(source, line_no, "empty key");
    c.file_[key] = text::trim(t.substr(eq + 1));
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError(fmt::format("config file {} not found", path.string()));
  return parse(text::read_file(path.string()), path.string());
}

void RunConfig::set(const std::string& key, std::string value) { overrides_[key] = std::move(value); }

std::optional<std::string> RunConfig::get(const std::string& key) const {
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  if (const char* e = std::getenv(env_name(key).c_str())) return std::string(e);
  if (auto it = file_.find(key); it != file_.end()) return it->second;
  return std::nullopt;
}

std::string RunConfig::get_or(const std::string& key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

std::optional<double> RunConfig::get_double(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  double d = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
  if (ec != std::errc() || p != v->data() + v->size()) {
    throw DomainError(fmt::format("setting '{}' is not a number: '{}'", key, *v));
  }
  return d;
}

void RunConfig::mark_path(const std::string& key) { path_keys_.insert(key); }

void RunConfig::track_file(const std::filesystem::path& path) {
  if (std::find(tracked_.begin(), tracked_.end(), path) == tracked_.end()) tracked_.push_back(path);
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::set<std::string> keys;
  for (const auto& [k, v] : file_) keys.insert(k);
  for (const auto& [k, v] : overrides_) keys.insert(k);
  std::map<std::string, std::string> out;
  for (const auto& k : keys) out[k] = *get(k);
  return out;
}

std::string RunConfig::snapshot_hash() const {
  std::uint64_t h = text::fnv1a64("");
  for (const auto& [k, v] : resolved()) {
    const auto shown = path_keys_.count(k) ? std::filesystem::path(v).filename().string() : v;
    h = text::fnv1a64(k + "=" + shown + "\n", h);
  }
  auto files = tracked_;
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  for (const auto& f : files) {
    h = text::fnv1a64("file:" + f.filename().string() + "\n", h);
    h = text::fnv1a64(text::read_file(f.string()), h);
  }
  return text::hex64(h);
}

std::string RunConfig::header_line(std::string_view command) const {
  return fmt::format("# hashecon {} command={} config={}", HASHECON_VERSION, command, snapshot_hash());
}

}  // namespace hashecon::config
