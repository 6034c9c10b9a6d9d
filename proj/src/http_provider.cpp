#include <chrono>
#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "clinichat/gateway.hpp"

namespace clinichat::gateway {

namespace {

using nlohmann::json;

class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig cfg) : cfg_(std::move(cfg)) {}

  std::string name() const override { return cfg_.name; }

  ChatResponse complete(const ChatRequest& req) override {
    json body{{"model", req.model_id},
              {"temperature", req.temperature},
              {"max_tokens", req.max_output_tokens}};
    json messages = json::array();
    for (const auto& m : req.messages) {
      messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
    }
    body["messages"] = messages;

    httplib::Client client(cfg_.base_url);
    client.set_connection_timeout(cfg_.timeout_seconds);
    client.set_read_timeout(cfg_.timeout_seconds);
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (!key || !*key) {
        throw Error(ErrorKind::provider_error,
                    "environment variable " + cfg_.api_key_env + " is not set");
      }
      client.set_bearer_token_auth(key);
    }

    auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(cfg_.chat_path, body.dump(), "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    if (!res) {
      if (res.error() == httplib::Error::ConnectionTimeout ||
          res.error() == httplib::Error::Read || res.error() == httplib::Error::Write) {
        throw Error(ErrorKind::timeout, cfg_.name + ": " + httplib::to_string(res.error()));
      }
      throw Error(ErrorKind::provider_error, cfg_.name + ": " + httplib::to_string(res.error()),
                  /*transient=*/true);
    }
    if (res->status == 429 || res->status >= 500) {
      throw Error(ErrorKind::provider_error,
                  cfg_.name + ": HTTP " + std::to_string(res->status), /*transient=*/true);
    }
    if (res->status != 200) {
      throw Error(ErrorKind::provider_error, cfg_.name + ": HTTP " + std::to_string(res->status) +
                                                 " " + res->body.substr(0, 200));
    }

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::provider_error, cfg_.name + ": unparseable reply: " + e.what());
    }
    ChatResponse out;
    try {
      out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::provider_error, cfg_.name + ": reply has no message content");
    }
    if (reply.contains("usage")) {
      out.usage.prompt = reply["usage"].value("prompt_tokens", 0L);
      out.usage.completion = reply["usage"].value("completion_tokens", 0L);
    }
    out.latency_ms = elapsed.count();
    out.provider = cfg_.name;
    return out;
  }

 private:
  HttpProviderConfig cfg_;
};

}  // namespace

std::shared_ptr<ChatProvider> make_http_provider(const HttpProviderConfig& cfg) {
  if (cfg.base_url.empty()) {
    throw Error(ErrorKind::config_error, "http provider '" + cfg.name + "' has no base_url");
  }
  return std::make_shared<HttpChatProvider>(cfg);
}

}  // namespace clinichat::gateway
