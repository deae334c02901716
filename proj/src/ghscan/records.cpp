#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/ghscan.hpp"
#include "records_io.hpp"

namespace hashecon::ghscan {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_line(std::string_view line, const std::string& where) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(where, 0, fmt::format("invalid JSON record: {}", e.what()));
  }
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) throw ParseError(where, 0, fmt::format("record lacks '{}'", key));
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(where, 0, fmt::format("record field '{}' has the wrong type", key));
  }
}

RepoRecord repo_from_json(const json& j, std::string_view matched_term, const std::string& where) {
  RepoRecord r;
  r.repo_id = field<std::int64_t>(j, "id", where);
  r.full_name = field<std::string>(j, "full_name", where);
  if (auto o = j.find("owner"); o != j.end() && o->is_object() && o->contains("login")) {
    r.owner = (*o)["login"].get<std::string>();
  } else {
    r.owner = std::string(r.full_name.substr(0, r.full_name.find('/')));
  }
  if (auto d = j.find("description"); d != j.end() && d->is_string()) r.description = d->get<std::string>();
  if (auto t = j.find("topics"); t != j.end() && t->is_array()) {
    for (const auto& x : *t) r.topics.push_back(x.get<std::string>());
  }
  if (auto s = j.find("stargazers_count"); s != j.end() && s->is_number_integer()) r.stars = s->get<std::int64_t>();
  try {
    r.created_at = parse_date(field<std::string>(j, "created_at", where));
  } catch (const DomainError& e) {
    throw ParseError(where, 0, e.what());
  }
  r.matched_term = std::string(matched_term);
  return r;
}

CodeHit code_from_json(const json& j, const std::string& where) {
  auto repo = j.find("repository");
  if (repo == j.end() || !repo->is_object()) throw ParseError(where, 0, "code hit lacks 'repository'");
  CodeHit h;
  h.repo_id = field<std::int64_t>(*repo, "id", where);
  if (repo->contains("full_name")) h.repo_full_name = (*repo)["full_name"].get<std::string>();
  if (auto p = j.find("path"); p != j.end() && p->is_string()) h.path = p->get<std::string>();
  return h;
}

ordered_json repo_to_json(const RepoRecord& r) {
  ordered_json j;
  j["id"] = r.repo_id;
  j["full_name"] = r.full_name;
  j["owner"] = {{"login", r.owner}};
  j["description"] = r.description ? ordered_json(*r.description) : ordered_json(nullptr);
  j["topics"] = r.topics;
  j["stargazers_count"] = r.stars;
  j["created_at"] = format_date(r.created_at) + "T00:00:00Z";
  return j;
}

ordered_json code_to_json(const CodeHit& h) {
  ordered_json j;
  j["repository"] = {{"id", h.repo_id}, {"full_name", h.repo_full_name}};
  j["path"] = h.path;
  return j;
}

struct Manifest {
  std::string endpoint;
  std::string query;
  int page = 0;
  std::uint64_t total_count = 0;
  bool incomplete = false;
};

Manifest read_manifest(const std::string& line, const std::string& where) {
  auto j = parse_line(line, where);
  if (!j.is_object() || j.value("kind", "") != "manifest") throw ParseError(where, 1, "missing manifest line");
  Manifest m;
  m.endpoint = field<std::string>(j, "endpoint", where);
  m.query = field<std::string>(j, "query", where);
  m.page = field<int>(j, "page", where);
  m.total_count = field<std::uint64_t>(j, "total_count", where);
  m.incomplete = j.value("incomplete_results", false);
  return m;
}

std::string manifest_line(Endpoint e, const SearchQuery& q, int page, std::uint64_t total, bool incomplete) {
  ordered_json m;
  m["kind"] = "manifest";
  m["endpoint"] = std::string(to_string(e));
  m["query"] = q.normalized();
  m["page"] = page;
  m["total_count"] = total;
  m["incomplete_results"] = incomplete;
  return m.dump();
}

template <class Page, class Fn>
std::optional<Page> read_page(const std::filesystem::path& file, Endpoint e, const SearchQuery& q, int page,
                              Fn item) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  const std::string where = file.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(where, 1, "empty record file");
  auto m = read_manifest(line, where);
  if (m.endpoint != to_string(e) || m.query != q.normalized() || m.page != page) {
    throw ParseError(where, 1, fmt::format("manifest is for '{}' page {}, expected '{}' page {}", m.query, m.page,
                                           q.normalized(), page));
  }
  Page out;
  out.total_count = m.total_count;
  out.incomplete_results = m.incomplete;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.items.push_back(item(parse_line(line, where), where));
    } catch (const ParseError& err) {
      throw ParseError(where, line_no, err.detail());
    }
  }
  return out;
}

template <class Page, class Fn>
void write_page(const std::filesystem::path& file, Endpoint e, const SearchQuery& q, int page, const Page& data,
                Fn item) {
  std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
    out << manifest_line(e, q, page, data.total_count, data.incomplete_results) << '\n';
    for (const auto& x : data.items) out << item(x).dump() << '\n';
    if (!out) throw IoError(fmt::format("short write to {}", tmp.string()));
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace

RepoRecord parse_repo_item(std::string_view json_line, std::string_view matched_term) {
  return repo_from_json(parse_line(json_line, "<record>"), matched_term, "<record>");
}

CodeHit parse_code_item(std::string_view json_line) {
  return code_from_json(parse_line(json_line, "<record>"), "<record>");
}

std::string repo_item_json(const RepoRecord& r) { return repo_to_json(r).dump(); }
std::string code_item_json(const CodeHit& h) { return code_to_json(h).dump(); }

std::filesystem::path recorded_page_path(Endpoint e, const SearchQuery& query, int page) {
  return std::filesystem::path("recorded") / std::string(to_string(e)) /
         fmt::format("{}-p{}.jsonl", text::hex64(text::fnv1a64(query.normalized())), page);
}

void write_recorded_page(const std::filesystem::path& file, Endpoint e, const SearchQuery& query, int page,
                         const RepoPage& data) {
  write_page(file, e, query, page, data, repo_to_json);
}

void write_recorded_page(const std::filesystem::path& file, Endpoint e, const SearchQuery& query, int page,
                         const CodePage& data) {
  write_page(file, e, query, page, data, code_to_json);
}

namespace detail {

std::optional<RepoPage> read_repo_page(const std::filesystem::path& file, const SearchQuery& q, int page) {
  return read_page<RepoPage>(file, Endpoint::repositories, q, page, [&](const json& j, const std::string& where) {
    return repo_from_json(j, q.term, where);
  });
}

std::optional<CodePage> read_code_page(const std::filesystem::path& file, const SearchQuery& q, int page) {
  return read_page<CodePage>(file, Endpoint::code, q, page, code_from_json);
}

RepoPage repo_page_from_api(std::string_view body, const SearchQuery& q) {
  auto j = parse_line(body, "<response>");
  RepoPage p;
  p.total_count = field<std::uint64_t>(j, "total_count", "<response>");
  p.incomplete_results = j.value("incomplete_results", false);
  for (const auto& item : j.value("items", json::array())) p.items.push_back(repo_from_json(item, q.term, "<response>"));
  return p;
}

CodePage code_page_from_api(std::string_view body) {
  auto j = parse_line(body, "<response>");
  CodePage p;
  p.total_count = field<std::uint64_t>(j, "total_count", "<response>");
  p.incomplete_results = j.value("incomplete_results", false);
  for (const auto& item : j.value("items", json::array())) p.items.push_back(code_from_json(item, "<response>"));
  return p;
}

std::vector<RepoRecord> read_corpus(const std::filesystem::path& file, std::string_view term) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", file.string()));
  std::vector<RepoRecord> out;
  std::string line;
  std::size_t line_no = 0;
  const std::string where = file.string();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(repo_from_json(parse_line(line, where), term, where));
    } catch (const ParseError& err) {
      throw ParseError(where, line_no, err.detail());
    }
  }
  return out;
}

}  // namespace detail

}  // namespace hashecon::ghscan
