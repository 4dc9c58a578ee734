#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "covaudit/evaluate.hpp"
#include "covaudit/query.hpp"

namespace covaudit {

/// Source of raw Evaluate response bodies. The record id and mode identify
/// the request for transports that replay recorded responses.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Returns the raw JSON body. Throws TransportError or FatalTransportError.
  virtual std::string fetch(const EvaluateRequest& request,
                            std::string_view record_id, QueryMode mode) = 0;
};

/// Percent-encodes bytes outside [A-Za-z0-9._-] so any record id is a safe
/// file name.
std::string encode_path_component(std::string_view id);

/// `<root>/<mode>/<encoded id>.json`; shared by fixtures and the archive.
std::filesystem::path response_path(const std::filesystem::path& root,
                                    std::string_view record_id, QueryMode mode);

/// Replays one recorded body per (record_id, mode).
class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path dir);

  /// Missing fixture: non-retryable TransportError.
  std::string fetch(const EvaluateRequest& request, std::string_view record_id,
                    QueryMode mode) override;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct HttpEndpoint {
  /// e.g. https://api.labs.cognitive.microsoft.com/academic/v1.0/evaluate
  std::string url;
  std::string key_header = "Ocp-Apim-Subscription-Key";
  std::chrono::seconds timeout{30};
};

/// Live Evaluate endpoint over HTTP(S). The query is sent as URL-encoded GET
/// parameters expr, count, offset, model and attributes.
///
/// Status handling: 200 returns the body; 401 and 403 raise
/// FatalTransportError; 429, 5xx and connection failures raise a retryable
/// TransportError; any other status raises a non-retryable TransportError.
class HttpTransport : public Transport {
 public:
  HttpTransport(HttpEndpoint endpoint, std::string api_key);
  ~HttpTransport() override;

  std::string fetch(const EvaluateRequest& request, std::string_view record_id,
                    QueryMode mode) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// fetch + parse.
ResultSet evaluate(const EvaluateRequest& request, Transport& transport,
                   std::string_view record_id, QueryMode mode);

}  // namespace covaudit
