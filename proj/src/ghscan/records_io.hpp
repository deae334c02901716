#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "hashecon/ghscan.hpp"

namespace hashecon::ghscan::detail {

std::optional<RepoPage> read_repo_page(const std::filesystem::path& file, const SearchQuery& q, int page);
std::optional<CodePage> read_code_page(const std::filesystem::path& file, const SearchQuery& q, int page);
RepoPage repo_page_from_api(std::string_view body, const SearchQuery& q);
CodePage code_page_from_api(std::string_view body);
std::vector<RepoRecord> read_corpus(const std::filesystem::path& file, std::string_view term);

}  // namespace hashecon::ghscan::detail
