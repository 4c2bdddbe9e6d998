#pragma once

// OpenAI-compatible HTTP provider. Configuration comes from the environment:
//   CRUX_LLM_BASE_URL  e.g. https://api.openai.com/v1 (default)
//   CRUX_LLM_API_KEY   bearer token, required
//   CRUX_LLM_ENDPOINT  "chat" (default) or "completions"

#include <chrono>
#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/llm/gateway.hpp"

namespace crux::llm {

struct LiveProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  bool chat_endpoint = true;
  std::chrono::seconds timeout{60};

  static LiveProviderConfig from_env() {
    LiveProviderConfig c;
    if (const char* url = std::getenv("CRUX_LLM_BASE_URL"); url && *url) c.base_url = url;
    if (const char* key = std::getenv("CRUX_LLM_API_KEY")) c.api_key = key;
    if (const char* ep = std::getenv("CRUX_LLM_ENDPOINT")) c.chat_endpoint = std::string(ep) != "completions";
    return c;
  }
};

class LiveProvider : public Provider {
 public:
  explicit LiveProvider(LiveProviderConfig config) : config_(std::move(config)) {
    const auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos) fail(Errc::InvalidArgument, "base URL needs a scheme: " + config_.base_url);
    const auto path_start = config_.base_url.find('/', scheme_end + 3);
    origin_ = config_.base_url.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  std::string complete(const ProviderCall& call) override {
    if (config_.api_key.empty()) fail(Errc::AuthMissing, "CRUX_LLM_API_KEY is not set");

    nlohmann::json body = {{"model", call.params.model_id},
                           {"temperature", call.params.temperature},
                           {"max_tokens", call.params.max_tokens}};
    std::string path = prefix_;
    if (config_.chat_endpoint) {
      body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", call.prompt}}});
      path += "/chat/completions";
    } else {
      body["prompt"] = call.prompt;
      path += "/completions";
    }

    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_bearer_token_auth(config_.api_key);
    const auto res = client.Post(path, body.dump(), "application/json");
    if (!res) fail(Errc::ProviderUnavailable, "request failed: " + httplib::to_string(res.error()));
    if (res->status == 429) fail(Errc::RateLimited, "provider rate limit", res->body);
    if (res->status == 401 || res->status == 403) fail(Errc::ProviderRejected, "credential refused", res->body);
    if (res->status >= 500 || res->status == 408) {
      fail(Errc::ProviderUnavailable, "provider status " + std::to_string(res->status), res->body);
    }
    if (res->status >= 400) fail(Errc::ProviderRejected, "provider status " + std::to_string(res->status), res->body);

    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
      fail(Errc::ProviderUnavailable, "unexpected provider payload", res->body);
    }
    const auto& choice = j["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
    if (choice.contains("text") && choice["text"].is_string()) return choice["text"].get<std::string>();
    fail(Errc::ProviderUnavailable, "provider returned no text", res->body);
  }

 private:
  LiveProviderConfig config_;
  std::string origin_;
  std::string prefix_;
};

}  // namespace crux::llm
