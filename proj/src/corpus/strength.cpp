#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "hashecon/common/error.hpp"
#include "hashecon/common/text.hpp"
#include "hashecon/strength.hpp"

namespace hashecon::corpus {

namespace {

// Most frequent entries of large public leak frequency lists, most common first.
constexpr std::array<std::string_view, 100> kBuiltinWords = {
    "123456",    "12345",      "123456789", "password",   "iloveyou",  "princess",  "1234567",
    "rockyou",   "12345678",   "abc123",    "nicole",     "daniel",    "babygirl",  "monkey",
    "lovely",    "jessica",    "654321",    "michael",    "ashley",    "qwerty",    "111111",
    "iloveu",    "000000",     "michelle",  "tigger",     "sunshine",  "chocolate", "password1",
    "soccer",    "anthony",    "friends",   "butterfly",  "purple",    "angel",     "jordan",
    "liverpool", "justin",     "loveme",    "123123",     "football",  "secret",    "andrea",
    "carlos",    "jennifer",   "joshua",    "bubbles",    "1234567890", "superman", "hannah",
    "amanda",    "loveyou",    "pretty",    "basketball", "andrew",    "angels",    "tweety",
    "flower",    "playboy",    "hello",     "elizabeth",  "hottie",    "tinkerbell", "charlie",
    "samantha",  "barbie",     "chelsea",   "lovers",     "teamo",     "jasmine",   "brandon",
    "666666",    "shadow",     "melissa",   "eminem",     "matthew",   "robert",    "danielle",
    "forever",   "family",     "jonathan",  "987654321",  "computer",  "whatever",  "dragon",
    "vanessa",   "cookie",     "naruto",    "summer",     "sweety",    "spongebob", "joseph",
    "junior",    "softball",   "taylor",    "yellow",     "daniela",   "lauren",    "mickey",
    "princesa",  "alexandra"};

// l33t character -> letters it may stand for.
const std::map<char32_t, std::u32string>& l33t_table() {
  static const std::map<char32_t, std::u32string> table = {
      {U'4', U"a"}, {U'@', U"a"}, {U'8', U"b"}, {U'(', U"c"}, {U'{', U"c"}, {U'[', U"c"},
      {U'<', U"c"}, {U'3', U"e"}, {U'6', U"g"}, {U'9', U"g"}, {U'1', U"il"}, {U'!', U"i"},
      {U'|', U"il"}, {U'7', U"lt"}, {U'0', U"o"}, {U'$', U"s"}, {U'5', U"s"}, {U'+', U"t"},
      {U'%', U"x"}, {U'2', U"z"}};
  return table;
}

constexpr std::size_t kMaxL33tCandidates = 256;

bool is_lower(char32_t c) { return c >= U'a' && c <= U'z'; }
bool is_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

char32_t lower(char32_t c) { return is_upper(c) ? c - U'A' + U'a' : c; }

double log2_binomial_sum(std::uint64_t n, std::uint64_t kmax) {
  // log2( sum_{i=1..kmax} C(n, i) ) via log-sum-exp over lgamma terms.
  std::vector<double> terms;
  for (std::uint64_t i = 1; i <= kmax; ++i) {
    double ln_c = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
    terms.push_back(ln_c);
  }
  double m = *std::max_element(terms.begin(), terms.end());
  double acc = 0;
  for (double t : terms) acc += std::exp(t - m);
  return (m + std::log(acc)) / std::log(2.0);
}

}  // namespace

int bruteforce_cardinality(std::u32string_view password) {
  bool lo = false, up = false, dg = false, sym = false, other = false;
  for (char32_t c : password) {
    if (is_lower(c)) lo = true;
    else if (is_upper(c)) up = true;
    else if (is_digit(c)) dg = true;
    else if (c >= 0x20 && c < 0x7F) sym = true;
    else other = true;
  }
  return (lo ? Charset::kLower : 0) + (up ? Charset::kUpper : 0) + (dg ? Charset::kDigits : 0) +
         (sym ? Charset::kSymbols : 0) + (other ? Charset::kNonAscii : 0);
}

double bruteforce_bits(std::u32string_view password) {
  if (password.empty()) return 0.0;
  return static_cast<double>(password.size()) * std::log2(static_cast<double>(bruteforce_cardinality(password)));
}

double BruteForceEstimator::estimate_bits(std::string_view password) const {
  auto cps = text::decode_utf8(password);
  if (!cps) throw DomainError("password is not valid UTF-8");
  return bruteforce_bits(*cps);
}

RankedDictionary::RankedDictionary(std::span<const std::string> words_by_rank) {
  std::uint64_t rank = 0;
  for (const auto& w : words_by_rank) {
    ++rank;
    ranks_.try_emplace(text::ascii_lower(w), rank);
  }
}

RankedDictionary RankedDictionary::builtin() {
  std::vector<std::string> words(kBuiltinWords.begin(), kBuiltinWords.end());
  return RankedDictionary(words);
}

RankedDictionary RankedDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dictionary " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = text::trim(line);
    if (!w.empty()) words.push_back(std::move(w));
  }
  return RankedDictionary(words);
}

std::uint64_t RankedDictionary::rank(std::string_view lowercase_word) const {
  auto it = ranks_.find(std::string(lowercase_word));
  return it == ranks_.end() ? 0 : it->second;
}

double uppercase_variation_bits(std::u32string_view word) {
  std::uint64_t upper = 0, low = 0;
  for (char32_t c : word) {
    if (is_upper(c)) ++upper;
    else if (is_lower(c)) ++low;
  }
  if (upper == 0) return 0.0;
  // Capitalized, trailing capital, or all caps: two variations.
  bool start_upper = is_upper(word.front()) && upper == 1;
  bool end_upper = is_upper(word.back()) && upper == 1;
  if (start_upper || end_upper || low == 0) return 1.0;
  return log2_binomial_sum(upper + low, std::min(upper, low));
}

PatternEstimator::PatternEstimator(RankedDictionary dictionary) : dictionary_(std::move(dictionary)) {}

PatternEstimator PatternEstimator::builtin() { return PatternEstimator(RankedDictionary::builtin()); }

std::optional<double> PatternEstimator::dictionary_bits(std::u32string_view password) const {
  if (dictionary_.size() == 0 || password.empty()) return std::nullopt;
  std::u32string lowered(password.size(), U' ');
  std::transform(password.begin(), password.end(), lowered.begin(), lower);

  // Distinct l33t characters present, each with its candidate letters.
  std::vector<std::pair<char32_t, std::u32string>> subs;
  for (char32_t c : lowered) {
    auto it = l33t_table().find(c);
    if (it == l33t_table().end()) continue;
    if (std::none_of(subs.begin(), subs.end(), [c](const auto& s) { return s.first == c; })) {
      subs.emplace_back(c, it->second);
    }
  }

  const double case_bits = uppercase_variation_bits(password);
  std::optional<double> best;

  // Mixed-radix enumeration: digit 0 keeps the character, digit k picks letter k-1.
  std::vector<std::size_t> choice(subs.size(), 0);
  for (std::size_t n = 0; n < kMaxL33tCandidates; ++n) {
    std::u32string candidate = lowered;
    double l33t_bits = 0.0;
    for (std::size_t s = 0; s < subs.size(); ++s) {
      if (choice[s] == 0) continue;
      char32_t subbed = subs[s].first;
      char32_t letter = subs[s].second[choice[s] - 1];
      std::uint64_t sub_count = std::count(lowered.begin(), lowered.end(), subbed);
      std::uint64_t plain_count = std::count(lowered.begin(), lowered.end(), letter);
      std::replace(candidate.begin(), candidate.end(), subbed, letter);
      l33t_bits += (sub_count == 0 || plain_count == 0)
                       ? 1.0
                       : log2_binomial_sum(sub_count + plain_count, std::min(sub_count, plain_count));
    }
    if (auto r = dictionary_.rank(text::encode_utf8(candidate)); r != 0) {
      double bits = std::log2(static_cast<double>(r)) + case_bits + l33t_bits;
      if (!best || bits < *best) best = bits;
    }
    // advance
    std::size_t s = 0;
    for (; s < subs.size(); ++s) {
      if (++choice[s] <= subs[s].second.size()) break;
      choice[s] = 0;
    }
    if (s == subs.size()) break;
  }
  return best;
}

std::optional<double> PatternEstimator::repeat_bits(std::u32string_view password) const {
  const std::size_t n = password.size();
  for (std::size_t k = 1; k <= n / 2; ++k) {
    if (n % k != 0) continue;
    bool periodic = true;
    for (std::size_t i = k; i < n && periodic; ++i) periodic = password[i] == password[i - k];
    if (!periodic) continue;
    double unit = best_match(password.substr(0, k)).bits;
    return unit + std::log2(static_cast<double>(n / k));
  }
  return std::nullopt;
}

std::optional<double> PatternEstimator::sequence_bits(std::u32string_view password) {
  const std::size_t n = password.size();
  if (n < 3) return std::nullopt;
  auto same_class = [](char32_t a, char32_t b) {
    return (is_lower(a) && is_lower(b)) || (is_upper(a) && is_upper(b)) || (is_digit(a) && is_digit(b));
  };
  const long delta = static_cast<long>(password[1]) - static_cast<long>(password[0]);
  if (delta != 1 && delta != -1) return std::nullopt;
  for (std::size_t i = 1; i < n; ++i) {
    if (static_cast<long>(password[i]) - static_cast<long>(password[i - 1]) != delta) return std::nullopt;
    if (!same_class(password[i], password[0])) return std::nullopt;
  }
  constexpr std::u32string_view kObviousStarts = U"aAzZ019";
  double base;
  if (kObviousStarts.find(password[0]) != std::u32string_view::npos) base = 4;
  else if (is_digit(password[0])) base = 10;
  else base = 26;
  if (delta < 0) base *= 2;
  return std::log2(base * static_cast<double>(n));
}

PatternMatch PatternEstimator::best_match(std::u32string_view password) const {
  PatternMatch best{PatternKind::bruteforce, bruteforce_bits(password)};
  auto consider = [&best](PatternKind kind, std::optional<double> bits) {
    if (bits && *bits < best.bits) best = PatternMatch{kind, *bits};
  };
  consider(PatternKind::dictionary, dictionary_bits(password));
  consider(PatternKind::sequence, sequence_bits(password));
  consider(PatternKind::repeat, repeat_bits(password));
  return best;
}

double PatternEstimator::estimate_bits(std::string_view password) const {
  auto cps = text::decode_utf8(password);
  if (!cps) throw DomainError("password is not valid UTF-8");
  return best_match(*cps).bits;
}

PrecomputedEstimator::PrecomputedEstimator(std::span<const PasswordRecord> table) {
  table_.reserve(table.size());
  for (const auto& r : table) table_.try_emplace(r.password, r.strength_bits);
}

double PrecomputedEstimator::estimate_bits(std::string_view password) const {
  auto it = table_.find(std::string(password));
  if (it != table_.end()) return it->second;
  return BruteForceEstimator{}.estimate_bits(password);
}

double estimate_strength(std::string_view password, const StrengthEstimator& estimator) {
  if (password.empty()) throw DomainError("cannot estimate the strength of an empty password");
  return estimator.estimate_bits(password);
}

void estimate_all(std::span<PasswordRecord> records, const StrengthEstimator& estimator, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, records.size() / 1024)));
  if (threads <= 1) {
    for (auto& r : records) r.strength_bits = estimate_strength(r.password, estimator);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (records.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          const std::size_t begin = t * chunk;
          const std::size_t end = std::min(records.size(), begin + chunk);
          for (std::size_t i = begin; i < end; ++i) {
            records[i].strength_bits = estimate_strength(records[i].password, estimator);
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::unique_ptr<StrengthEstimator> make_estimator(std::string_view kind, const std::filesystem::path& dictionary) {
  if (kind == "bruteforce") return std::make_unique<BruteForceEstimator>();
  if (kind == "pattern") {
    if (dictionary.empty()) return std::make_unique<PatternEstimator>(PatternEstimator::builtin());
    return std::make_unique<PatternEstimator>(RankedDictionary::load(dictionary));
  }
  throw DomainError("unknown estimator '" + std::string(kind) + "' (expected pattern or bruteforce)");
}

}  // namespace hashecon::corpus
