#include <httplib.h>

#include "engage/mockgraph.hpp"
#include "jsonio.hpp"

namespace engage {

using detail::ordered_json;

struct MockGraphServer::Impl {
  httplib::Server server;
};

MockGraphServer::MockGraphServer(std::shared_ptr<MockGraph> graph)
    : impl_(std::make_unique<Impl>()), graph_(std::move(graph)) {
  impl_->server.Get("/", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("id")) {
      res.status = 400;
      res.set_content(R"({"error":{"message":"missing id","code":100}})", "application/json");
      return;
    }
    auto reply = graph_->query_with_token(req.get_param_value("id"),
                                          req.get_param_value("access_token"));
    if (auto* t = std::get_if<Throttled>(&reply)) {
      res.status = 429;
      res.set_header("Retry-After", std::to_string(t->retry_after.value_or(std::chrono::seconds{0}).count()));
      res.set_content(R"({"error":{"message":"rate limited","code":4}})", "application/json");
      return;
    }
    if (std::holds_alternative<AuthRejected>(reply)) {
      res.status = 401;
      res.set_content(R"({"error":{"message":"invalid token","code":190}})", "application/json");
      return;
    }
    if (std::holds_alternative<TransientFailure>(reply)) {
      res.status = 500;
      res.set_content(R"({"error":{"message":"server error","code":1}})", "application/json");
      return;
    }
    const auto& hit = std::get<std::optional<GraphHit>>(reply);
    ordered_json body = ordered_json::object();
    if (hit) {
      body["id"] = hit->object_id;
      body["engagement"]["share_count"] = hit->counts.shares;
      body["engagement"]["reaction_count"] = hit->counts.reactions;
      body["engagement"]["comment_count"] = hit->counts.comments;
      body["engagement"]["comment_plugin_count"] = hit->counts.plugin_comments;
    }
    res.set_content(detail::dump_compact(body), "application/json");
  });
}

MockGraphServer::~MockGraphServer() { stop(); }

int MockGraphServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? impl_->server.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->server.bind_to_port(host, port)) port_ = -1;
  if (port_ < 0) throw IoFailure("mock graph server cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void MockGraphServer::serve_forever(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!impl_->server.listen(host, port)) {
    throw IoFailure("mock graph server cannot listen on " + host + ":" + std::to_string(port));
  }
}

void MockGraphServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockGraphServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace engage
