#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hashecon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value outside the domain an operation is defined on (zero cost, t < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line),
        detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the source/line prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

/// Raised once retries are exhausted. `resume_token` names the query/page that failed;
/// completed queries are already in the cache, so re-running resumes from there.
class RateLimitError : public NetworkError {
 public:
  RateLimitError(const std::string& what, std::string resume_token)
      : NetworkError(what), resume_token_(std::move(resume_token)) {}

  const std::string& resume_token() const noexcept { return resume_token_; }

 private:
  std::string resume_token_;
};

/// Broken accounting identity; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hashecon
