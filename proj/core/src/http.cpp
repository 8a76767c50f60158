#include "http.hpp"

#include <cctype>
#include <cstdio>

#include <httplib.h>

namespace engage::detail {

HttpOutcome http_get(const std::string& base_url, const std::string& path_and_query,
                     std::chrono::seconds timeout) {
  HttpOutcome outcome;
  try {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_follow_location(true);
    auto res = client.Get(path_and_query);
    if (!res) {
      outcome.error = "transport error: " + httplib::to_string(res.error());
      return outcome;
    }
    HttpResponse r;
    r.status = res->status;
    r.body = res->body;
    if (res->has_header("Retry-After")) {
      try {
        r.retry_after = std::chrono::seconds{std::stol(res->get_header_value("Retry-After"))};
      } catch (const std::exception&) {
        // HTTP-date form; fall back to the policy delay
      }
    }
    outcome.response = std::move(r);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

std::string url_encode(std::string_view s) {
  std::string out;
  out.reserve(s.size() * 3);
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out.append(buf);
    }
  }
  return out;
}

}  // namespace engage::detail
