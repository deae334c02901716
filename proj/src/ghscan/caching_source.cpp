#include "hashecon/ghscan.hpp"
#include "records_io.hpp"

namespace hashecon::ghscan {

CachingSource::CachingSource(SearchSource& upstream, std::filesystem::path dir)
    : upstream_(upstream), dir_(std::move(dir)) {}

RepoPage CachingSource::repositories(const SearchQuery& query, int page) {
  const auto file = dir_ / recorded_page_path(Endpoint::repositories, query, page);
  if (auto rec = detail::read_repo_page(file, query, page)) {
    std::lock_guard lock(mu_);
    ++hits_;
    return *rec;
  }
  auto fresh = upstream_.repositories(query, page);
  std::lock_guard lock(write_mu_);
  write_recorded_page(file, Endpoint::repositories, query, page, fresh);
  return fresh;
}

CodePage CachingSource::code(const SearchQuery& query, int page) {
  const auto file = dir_ / recorded_page_path(Endpoint::code, query, page);
  if (auto rec = detail::read_code_page(file, query, page)) {
    std::lock_guard lock(mu_);
    ++hits_;
    return *rec;
  }
  auto fresh = upstream_.code(query, page);
  std::lock_guard lock(write_mu_);
  write_recorded_page(file, Endpoint::code, query, page, fresh);
  return fresh;
}

std::uint64_t CachingSource::api_calls() const {
  std::lock_guard lock(mu_);
  return hits_ + upstream_.api_calls();
}

}  // namespace hashecon::ghscan
