#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "hashecon/common/error.hpp"
#include "hashecon/ghscan.hpp"
#include "records_io.hpp"

namespace hashecon::ghscan {

using namespace std::chrono_literals;

namespace {

void default_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

}  // namespace

TokenBucket::TokenBucket(double capacity, double refill_per_second, Sleeper sleeper,
                         std::function<Clock::time_point()> now)
    : capacity_(capacity),
      rate_(refill_per_second),
      tokens_(capacity),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper(default_sleep)),
      now_(now ? std::move(now) : std::function<Clock::time_point()>([] { return Clock::now(); })),
      last_(now_()) {
  if (!(capacity >= 1.0) || !(refill_per_second > 0.0)) throw DomainError("token bucket needs capacity >= 1 and a positive rate");
}

void TokenBucket::refill_locked() {
  auto t = now_();
  std::chrono::duration<double> dt = t - last_;
  last_ = t;
  if (dt.count() > 0) tokens_ = std::min(capacity_, tokens_ + dt.count() * rate_);
}

double TokenBucket::available() {
  std::lock_guard lock(mu_);
  refill_locked();
  return tokens_;
}

void TokenBucket::acquire() {
  for (;;) {
    std::chrono::milliseconds wait{};
    {
      std::lock_guard lock(mu_);
      refill_locked();
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil((1.0 - tokens_) / rate_ * 1000.0)));
    }
    sleeper_(std::max(wait, 1ms));
  }
}

struct LiveClient::Impl {
  LiveOptions opts;
  std::unique_ptr<httplib::Client> http;
  TokenBucket bucket;
  std::mutex mu;
  std::uint64_t calls = 0;

  explicit Impl(LiveOptions o)
      : opts(std::move(o)), bucket(std::max(1.0, opts.requests_per_minute), opts.requests_per_minute / 60.0, opts.sleeper) {}
};

LiveClient::LiveClient(LiveOptions options) {
  if (!options.sleeper) options.sleeper = default_sleep;
  if (options.token.empty()) {
    if (const char* t = std::getenv("GITHUB_TOKEN")) options.token = t;
  }
  impl_ = std::make_unique<Impl>(std::move(options));
  impl_->http = std::make_unique<httplib::Client>(impl_->opts.base_url);
  if (!impl_->http->is_valid()) {
    throw NetworkError(fmt::format("cannot use base URL '{}' (https needs a build with OpenSSL)", impl_->opts.base_url));
  }
  impl_->http->set_connection_timeout(impl_->opts.timeout);
  impl_->http->set_read_timeout(impl_->opts.timeout);
}

LiveClient::~LiveClient() = default;

namespace {

std::optional<std::chrono::milliseconds> server_hint(const httplib::Response& res) {
  if (res.has_header("Retry-After")) {
    try {
      return std::chrono::seconds(std::stoll(res.get_header_value("Retry-After")));
    } catch (const std::exception&) {
    }
  }
  if (res.has_header("X-RateLimit-Remaining") && res.get_header_value("X-RateLimit-Remaining") == "0" &&
      res.has_header("X-RateLimit-Reset")) {
    try {
      auto reset = std::chrono::sys_seconds(std::chrono::seconds(std::stoll(res.get_header_value("X-RateLimit-Reset"))));
      auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
      return std::chrono::duration_cast<std::chrono::milliseconds>(std::max(reset - now, std::chrono::seconds(1)));
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

}  // namespace

std::string LiveClient::get(Endpoint e, const SearchQuery& query, int page) {
  auto& s = *impl_;
  const std::string path = e == Endpoint::repositories ? "/search/repositories" : "/search/code";
  const std::string token = fmt::format("{} {} {}", to_string(e), page, query.normalized());
  httplib::Params params{{"q", query.normalized()}, {"per_page", std::to_string(kPerPage)}, {"page", std::to_string(page)}};
  httplib::Headers headers{{"Accept", "application/vnd.github+json"},
                           {"X-GitHub-Api-Version", "2022-11-28"},
                           {"User-Agent", "hashecon/" HASHECON_VERSION}};
  if (!s.opts.token.empty()) headers.emplace("Authorization", "Bearer " + s.opts.token);

  auto backoff = s.opts.initial_backoff;
  std::string last_problem;
  bool rate_limited = false;
  for (int attempt = 0; attempt <= s.opts.max_retries; ++attempt) {
    s.bucket.acquire();
    {
      std::lock_guard lock(s.mu);
      ++s.calls;
    }
    auto res = s.http->Get(path, params, headers);
    std::chrono::milliseconds wait = backoff;
    if (!res) {
      last_problem = fmt::format("request failed: {}", httplib::to_string(res.error()));
      rate_limited = false;
    } else if (res->status == 200) {
      return res->body;
    } else if (res->status == 403 || res->status == 429 || res->status >= 500) {
      last_problem = fmt::format("HTTP {}", res->status);
      rate_limited = res->status == 403 || res->status == 429;
      if (auto hint = server_hint(*res)) wait = *hint;
    } else {
      throw NetworkError(fmt::format("HTTP {} for '{}': {}", res->status, query.normalized(), res->body.substr(0, 200)));
    }
    if (attempt == s.opts.max_retries) break;
    s.opts.sleeper(wait);
    backoff = std::min(backoff * 2, s.opts.max_backoff);
  }
  if (rate_limited) {
    throw RateLimitError(fmt::format("rate limit not lifted after {} retries ({})", s.opts.max_retries, last_problem), token);
  }
  throw NetworkError(fmt::format("giving up on '{}': {}", query.normalized(), last_problem));
}

RepoPage LiveClient::repositories(const SearchQuery& query, int page) {
  if (static_cast<std::uint64_t>(page - 1) * kPerPage >= kResultCap) return {};
  return detail::repo_page_from_api(get(Endpoint::repositories, query, page), query);
}

CodePage LiveClient::code(const SearchQuery& query, int page) {
  if (static_cast<std::uint64_t>(page - 1) * kPerPage >= kResultCap) return {};
  return detail::code_page_from_api(get(Endpoint::code, query, page));
}

std::uint64_t LiveClient::api_calls() const {
  std::lock_guard lock(impl_->mu);
  return impl_->calls;
}

}  // namespace hashecon::ghscan
