#pragma once

// Every language-model call goes through Gateway::complete: the request is
// rendered from a registered template, keyed by a SHA-256 digest, served from
// the cache when possible, and otherwise sent to the configured Provider with
// bounded concurrency and exponential-backoff retries.

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/text.hpp"
#include "crux/llm/templates.hpp"

namespace crux::llm {

struct ModelParams {
  std::string model_id = "gpt-4o-mini";
  double temperature = 0.0;
  int max_tokens = 512;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Temperature 0 for extraction and validation templates, 0.7 for the
/// generative ones.
inline ModelParams default_params(std::string_view template_id, std::string model_id = "gpt-4o-mini") {
  ModelParams p;
  p.model_id = std::move(model_id);
  p.temperature = find_template(template_id).generative ? 0.7 : 0.0;
  return p;
}

struct CompletionRequest {
  std::string template_id;
  Bindings inputs;
  ModelParams params;
};

struct LlmExchange {
  std::string template_id;
  Bindings bound_inputs;
  ModelParams params;
  std::string digest;
  std::string response_text;
  bool cached = false;
  std::chrono::nanoseconds latency{0};
};

/// What a provider sees: the rendered prompt plus enough context to record
/// or replay the exchange.
struct ProviderCall {
  std::string digest;
  std::string template_id;
  std::string prompt;
  ModelParams params;
};

/// A backend that turns a prompt into text. Implementations report transient
/// trouble as Errc::ProviderUnavailable or Errc::RateLimited (both retried)
/// and permanent trouble as Errc::AuthMissing or Errc::ProviderRejected.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const ProviderCall& call) = 0;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_Digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0x0F]);
  }
  return out;
}

/// Stable cache key over (template_id, bound inputs, params). The canonical
/// form is compact JSON with sorted keys.
inline std::string request_digest(const CompletionRequest& req) {
  nlohmann::json canonical = {{"template_id", req.template_id},
                              {"inputs", req.inputs},
                              {"model_id", req.params.model_id},
                              {"temperature", req.params.temperature},
                              {"max_tokens", req.params.max_tokens}};
  return sha256_hex(canonical.dump());
}

inline bool retryable(Errc code) { return code == Errc::ProviderUnavailable || code == Errc::RateLimited; }

struct GatewayOptions {
  int max_attempts = 4;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{8000};
  std::size_t max_in_flight = 4;
  /// JSONL file with one `{digest, template_id, response_text}` per line.
  std::optional<std::filesystem::path> cache_file;
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Provider> provider, GatewayOptions options = {})
      : provider_(std::move(provider)), options_(std::move(options)) {
    if (!provider_) fail(Errc::ProviderUnavailable, "no provider configured");
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
    if (options_.cache_file) load_cache(*options_.cache_file);
  }

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  LlmExchange complete(const CompletionRequest& req) {
    const auto started = std::chrono::steady_clock::now();
    const auto& tmpl = find_template(req.template_id);
    const std::string prompt = render(tmpl, req.inputs);

    LlmExchange ex{req.template_id, req.inputs, req.params, request_digest(req), {}, false, {}};

    std::shared_future<std::string> pending;
    std::promise<std::string> promise;
    bool owner = false;
    {
      std::lock_guard lock(cache_mu_);
      if (const auto hit = cache_.find(ex.digest); hit != cache_.end()) {
        ex.response_text = hit->second;
        ex.cached = true;
      } else if (const auto inflight = in_flight_.find(ex.digest); inflight != in_flight_.end()) {
        pending = inflight->second;
      } else {
        pending = promise.get_future().share();
        in_flight_.emplace(ex.digest, pending);
        owner = true;
      }
    }

    if (!ex.cached && !owner) {
      // Someone else is already asking the same question.
      ex.response_text = pending.get();
      ex.cached = true;
    } else if (owner) {
      try {
        std::string text = call_with_retries({ex.digest, req.template_id, prompt, req.params});
        store(ex.digest, req.template_id, text);
        promise.set_value(text);
        ex.response_text = std::move(text);
      } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard lock(cache_mu_);
        in_flight_.erase(ex.digest);
        throw;
      }
    }
    ex.latency = std::chrono::steady_clock::now() - started;
    return ex;
  }

  std::size_t cache_size() const {
    std::lock_guard lock(cache_mu_);
    return cache_.size();
  }

  const GatewayOptions& options() const { return options_; }

 private:
  class SlotGuard {
   public:
    explicit SlotGuard(Gateway& g) : g_(g) {
      std::unique_lock lock(g_.slots_mu_);
      g_.slots_cv_.wait(lock, [&] { return g_.in_use_ < g_.options_.max_in_flight; });
      ++g_.in_use_;
    }
    ~SlotGuard() {
      {
        std::lock_guard lock(g_.slots_mu_);
        --g_.in_use_;
      }
      g_.slots_cv_.notify_one();
    }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

   private:
    Gateway& g_;
  };

  std::string call_with_retries(const ProviderCall& call) {
    auto delay = options_.base_delay;
    for (int attempt = 1;; ++attempt) {
      try {
        SlotGuard slot(*this);
        return provider_->complete(call);
      } catch (const Error& e) {
        if (!retryable(e.code()) || attempt >= options_.max_attempts) throw;
      }
      options_.sleep(delay);
      delay = std::min(delay * 2, options_.max_delay);
    }
  }

  void store(const std::string& digest, const std::string& template_id, const std::string& text) {
    std::lock_guard lock(cache_mu_);
    cache_.emplace(digest, text);
    in_flight_.erase(digest);
    if (options_.cache_file) {
      std::ofstream out(*options_.cache_file, std::ios::app | std::ios::binary);
      out << nlohmann::json{{"digest", digest}, {"template_id", template_id}, {"response_text", text}}.dump()
          << '\n';
    }
  }

  void load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (text::trim(line).empty()) continue;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("digest") || !j.contains("response_text")) continue;
      cache_.emplace(j["digest"].get<std::string>(), j["response_text"].get<std::string>());
    }
  }

  std::shared_ptr<Provider> provider_;
  GatewayOptions options_;

  mutable std::mutex cache_mu_;
  std::map<std::string, std::string> cache_;
  std::map<std::string, std::shared_future<std::string>> in_flight_;

  std::mutex slots_mu_;
  std::condition_variable slots_cv_;
  std::size_t in_use_ = 0;
};

}  // namespace crux::llm
