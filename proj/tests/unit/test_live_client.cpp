#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "hashecon/common/error.hpp"
#include "hashecon/ghscan.hpp"

using namespace hashecon;
using namespace hashecon::ghscan;
using namespace std::chrono_literals;

namespace {

// Local stand-in for the search API. `script` lists status codes to return before succeeding.
class StubApi {
 public:
  StubApi() {
    server_.Get("/search/repositories", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_auth = req.get_header_value("Authorization");
      last_version = req.get_header_value("X-GitHub-Api-Version");
      last_q = req.get_param_value("q");
      last_page = req.get_param_value("page");
      if (next < script.size()) {
        int code = script[next++];
        res.status = code;
        if (code == 429) res.set_header("Retry-After", "2");
        if (code == 403) {
          res.set_header("X-RateLimit-Remaining", "0");
          res.set_header("X-RateLimit-Reset", "0");
        }
        res.set_content("{\"message\":\"nope\"}", "application/json");
        return;
      }
      res.set_content(R"({"total_count":2,"incomplete_results":false,"items":[
        {"id":11,"full_name":"a/kdf","owner":{"login":"a"},"description":"argon2 binding","topics":["kdf"],
         "stargazers_count":5,"created_at":"2019-02-03T04:05:06Z"},
        {"id":12,"full_name":"b/x","owner":{"login":"b"},"description":null,"topics":[],
         "stargazers_count":0,"created_at":"2020-01-01T00:00:00Z"}]})",
                      "application/json");
    });
    server_.Get("/search/code", [this](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.set_content(R"({"total_count":1,"incomplete_results":false,"items":[
        {"path":"src/h.c","repository":{"id":77,"full_name":"c/d"}}]})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubApi() {
    server_.stop();
    thread_.join();
  }

  LiveOptions options(std::vector<std::chrono::milliseconds>* sleeps) const {
    LiveOptions o;
    o.base_url = "http://127.0.0.1:" + std::to_string(port_);
    o.token = "test-token";
    o.requests_per_minute = 6000;
    o.max_retries = 3;
    o.initial_backoff = 100ms;
    o.timeout = 5s;
    o.sleeper = [sleeps](std::chrono::milliseconds d) { sleeps->push_back(d); };
    return o;
  }

  std::vector<int> script;
  std::size_t next = 0;
  std::atomic<int> hits{0};
  std::string last_auth, last_version, last_q, last_page;

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

SearchQuery query() {
  SearchQuery q;
  q.term = "Argon2";
  q.created_range = DateRange{parse_date("2019-01-01"), parse_date("2020-12-31")};
  return q;
}

}  // namespace

TEST(LiveClient, ParsesPagesAndSendsHeaders) {
  StubApi api;
  std::vector<std::chrono::milliseconds> sleeps;
  LiveClient client(api.options(&sleeps));
  auto page = client.repositories(query(), 2);
  EXPECT_EQ(page.total_count, 2u);
  ASSERT_EQ(page.items.size(), 2u);
  EXPECT_EQ(page.items[0].owner, "a");
  EXPECT_EQ(format_date(page.items[0].created_at), "2019-02-03");
  EXPECT_FALSE(page.items[1].description.has_value());
  EXPECT_EQ(api.last_auth, "Bearer test-token");
  EXPECT_EQ(api.last_version, "2022-11-28");
  EXPECT_EQ(api.last_q, query().normalized());
  EXPECT_EQ(api.last_page, "2");
  auto code = client.code(query(), 1);
  EXPECT_EQ(code.items.at(0).repo_id, 77);
  EXPECT_EQ(client.api_calls(), 2u);
  EXPECT_TRUE(sleeps.empty());
  // Pages past the result cap are never requested.
  EXPECT_TRUE(client.repositories(query(), 11).items.empty());
  EXPECT_EQ(api.hits.load(), 2);
}

TEST(LiveClient, RetriesWithServerHintsAndBackoff) {
  StubApi api;
  api.script = {429, 500};
  std::vector<std::chrono::milliseconds> sleeps;
  LiveClient client(api.options(&sleeps));
  EXPECT_EQ(client.repositories(query(), 1).items.size(), 2u);
  ASSERT_EQ(sleeps.size(), 2u);
  EXPECT_EQ(sleeps[0], 2000ms);  // Retry-After
  EXPECT_EQ(sleeps[1], 200ms);   // doubled backoff
  EXPECT_EQ(api.hits.load(), 3);
}

TEST(LiveClient, RateLimitExhaustionCarriesResumeToken) {
  StubApi api;
  api.script = {403, 403, 403, 403, 403};
  std::vector<std::chrono::milliseconds> sleeps;
  LiveClient client(api.options(&sleeps));
  try {
    client.repositories(query(), 3);
    FAIL() << "expected RateLimitError";
  } catch (const RateLimitError& e) {
    EXPECT_EQ(e.resume_token(), "repositories 3 " + query().normalized());
  }
  EXPECT_EQ(api.hits.load(), 4);
  for (auto s : sleeps) EXPECT_GE(s, 1000ms);  // reset hint in the past clamps to one second
}

TEST(LiveClient, ClientErrorsAreNotRetried) {
  StubApi api;
  api.script = {422};
  std::vector<std::chrono::milliseconds> sleeps;
  LiveClient client(api.options(&sleeps));
  EXPECT_THROW(client.repositories(query(), 1), NetworkError);
  EXPECT_EQ(api.hits.load(), 1);
}

TEST(LiveClient, ServerErrorsBecomeNetworkError) {
  StubApi api;
  api.script = {502, 502, 502, 502};
  std::vector<std::chrono::milliseconds> sleeps;
  LiveClient client(api.options(&sleeps));
  try {
    client.repositories(query(), 1);
    FAIL();
  } catch (const RateLimitError&) {
    FAIL() << "5xx is not a rate limit";
  } catch (const NetworkError&) {
  }
}

TEST(TokenBucket, WaitsForRefill) {
  Clock::time_point now{};
  std::vector<std::chrono::milliseconds> sleeps;
  TokenBucket bucket(
      2, 1.0, [&](std::chrono::milliseconds d) { sleeps.push_back(d), now += d; }, [&] { return now; });
  bucket.acquire();
  bucket.acquire();
  EXPECT_TRUE(sleeps.empty());
  bucket.acquire();
  ASSERT_EQ(sleeps.size(), 1u);
  EXPECT_EQ(sleeps[0], 1000ms);
  EXPECT_THROW(TokenBucket(0, 1), DomainError);
}

TEST(TokenBucket, SharedAcrossThreads) {
  std::atomic<int> slept{0};
  TokenBucket bucket(1000, 1.0, [&](std::chrono::milliseconds) { ++slept; });
  std::vector<std::thread> ts;
  for (int t = 0; t < 8; ++t) {
    ts.emplace_back([&] {
      for (int i = 0; i < 100; ++i) bucket.acquire();
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(slept.load(), 0);
  EXPECT_LT(bucket.available(), 200.5);
}
