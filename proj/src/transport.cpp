#include "covaudit/transport.hpp"

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <fstream>
#include <sstream>

#include "covaudit/error.hpp"

namespace covaudit {

std::string encode_path_component(std::string_view id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    // A leading dot would produce hidden files or "." / "..".
    if (safe && !(c == '.' && out.empty())) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::filesystem::path response_path(const std::filesystem::path& root,
                                    std::string_view record_id,
                                    QueryMode mode) {
  return root / std::string(to_string(mode)) /
         (encode_path_component(record_id) + ".json");
}

FixtureTransport::FixtureTransport(std::filesystem::path dir)
    : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_))
    throw Error("fixture directory does not exist: " + dir_.string());
}

std::string FixtureTransport::fetch(const EvaluateRequest&,
                                    std::string_view record_id,
                                    QueryMode mode) {
  auto path = response_path(dir_, record_id, mode);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw TransportError("no fixture for record '" + std::string(record_id) +
                             "' (" + std::string(to_string(mode)) + ")",
                         false);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct HttpTransport::Impl {
  HttpEndpoint endpoint;
  std::string api_key;
  std::string scheme_host_port;
  std::string path;
};

HttpTransport::HttpTransport(HttpEndpoint endpoint, std::string api_key)
    : impl_(std::make_unique<Impl>()) {
  const std::string& url = endpoint.url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error("endpoint URL lacks a scheme: " + url);
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw Error("unsupported endpoint scheme: " + scheme);
  auto path_start = url.find('/', scheme_end + 3);
  impl_->scheme_host_port =
      path_start == std::string::npos ? url : url.substr(0, path_start);
  impl_->path = path_start == std::string::npos ? "/" : url.substr(path_start);
  impl_->endpoint = std::move(endpoint);
  impl_->api_key = std::move(api_key);
}

HttpTransport::~HttpTransport() = default;

std::string HttpTransport::fetch(const EvaluateRequest& request,
                                 std::string_view, QueryMode) {
  // httplib clients are not safe for concurrent use; one per request.
  httplib::Client cli(impl_->scheme_host_port);
  auto timeout = impl_->endpoint.timeout.count();
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);

  httplib::Params params{
      {"expr", request.expr},
      {"count", std::to_string(request.count)},
      {"offset", std::to_string(request.offset)},
      {"model", request.model},
      {"attributes", request.attribute_list()},
  };
  httplib::Headers headers;
  if (!impl_->api_key.empty())
    headers.emplace(impl_->endpoint.key_header, impl_->api_key);

  auto res = cli.Get(impl_->path, params, headers);
  if (!res)
    throw TransportError("request failed: " + httplib::to_string(res.error()),
                         true);
  const int status = res->status;
  if (status == 200) return res->body;
  const std::string msg = "HTTP " + std::to_string(status) + ": " +
                          res->body.substr(0, 200);
  if (status == 401 || status == 403) throw FatalTransportError(msg);
  if (status == 429 || status >= 500) throw TransportError(msg, true);
  throw TransportError(msg, false);
}

ResultSet evaluate(const EvaluateRequest& request, Transport& transport,
                   std::string_view record_id, QueryMode mode) {
  request.validate();
  return parse_evaluate_response(transport.fetch(request, record_id, mode),
                                 request);
}

}  // namespace covaudit
