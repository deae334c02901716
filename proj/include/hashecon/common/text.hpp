#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hashecon::text {

/// Decodes a strict UTF-8 byte sequence (no overlongs, no surrogates, <= U+10FFFF).
std::optional<std::u32string> decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view cps);
bool is_valid_utf8(std::string_view bytes);
std::size_t utf8_length(std::string_view valid_utf8);

std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);

/// FNV-1a 64-bit; used for content-addressed cache names and config snapshots.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);

}  // namespace hashecon::text
