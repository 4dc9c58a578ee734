#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace covaudit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file could not be parsed. `locator` is "path:line" or similar.
class ParseError : public Error {
 public:
  ParseError(std::string locator, const std::string& what)
      : Error(locator + ": " + what), locator_(std::move(locator)) {}
  const std::string& locator() const noexcept { return locator_; }

 private:
  std::string locator_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate record_id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class MissingColumnError : public Error {
 public:
  MissingColumnError(const std::string& file, std::string column)
      : Error(file + ": missing required column '" + column + "'"),
        column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

/// Title consisted solely of characters removed by normalization.
class EmptyTitleError : public Error {
 public:
  using Error::Error;
};

/// Every title word was filtered; no words query can be built.
class EmptyTokenListError : public Error {
 public:
  using Error::Error;
};

/// Response body was not a well-formed Evaluate payload.
class MalformedPayloadError : public Error {
 public:
  using Error::Error;
};

/// Request failed. Retryable failures are network errors, 429 and 5xx.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// Authentication or quota rejection. Stops the whole run.
class FatalTransportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s = "invalid configuration";
    for (const auto& x : p) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> problems_;
};

}  // namespace covaudit
