#pragma once

// Thin internal wrapper over cpp-httplib for the live adapters.

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "engage/retry.hpp"

namespace engage::detail {

struct HttpResponse {
  int status = 0;
  std::string body;
  std::optional<std::chrono::seconds> retry_after;
};

struct HttpOutcome {
  std::optional<HttpResponse> response;
  std::string error;  // transport error when response is empty
};

/// GET `path_and_query` against `base_url` ("http://host:port" or "https://host").
HttpOutcome http_get(const std::string& base_url, const std::string& path_and_query,
                     std::chrono::seconds timeout = std::chrono::seconds{30});

/// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string url_encode(std::string_view s);

/// Maps transport/status failures onto the retry vocabulary; nullopt means
/// the response is a 2xx/404 the adapter should parse itself.
template <class T>
std::optional<Reply<T>> classify_failure(const HttpOutcome& outcome,
                                         const std::set<int>& throttle_codes) {
  if (!outcome.response) return Reply<T>{TransientFailure{outcome.error}};
  const auto& r = *outcome.response;
  if (throttle_codes.count(r.status)) return Reply<T>{Throttled{r.retry_after}};
  if (r.status == 401 || r.status == 403) {
    return Reply<T>{AuthRejected{"HTTP " + std::to_string(r.status)}};
  }
  if (r.status >= 500 || (r.status >= 400 && r.status != 404)) {
    return Reply<T>{TransientFailure{"HTTP " + std::to_string(r.status)}};
  }
  return std::nullopt;
}

}  // namespace engage::detail
