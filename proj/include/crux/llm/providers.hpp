#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/llm/gateway.hpp"

namespace crux::llm {

/// Replays recorded exchanges from a JSONL fixture
/// (`{"digest", "template_id", "response_text"}` per line).
///
/// Lookup is by digest. Entries whose digest is the empty string are
/// hand-written scripts: they answer, in file order, any call for their
/// template that has no exact digest match.
class MockProvider : public Provider {
 public:
  MockProvider() = default;

  static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::FileNotFound, "cannot open fixture " + path.string());
    auto mock = std::make_shared<MockProvider>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("response_text")) {
        fail(Errc::ParseFailure, path.string() + ":" + std::to_string(line_no) + " is not a fixture entry", line);
      }
      mock->add(j.value("digest", ""), j.value("template_id", ""), j["response_text"].get<std::string>());
    }
    return mock;
  }

  void add(const std::string& digest, const std::string& template_id, std::string response) {
    std::lock_guard lock(mu_);
    if (digest.empty()) {
      scripted_[template_id].push_back(std::move(response));
    } else {
      by_digest_.emplace(digest, std::move(response));
    }
  }

  std::string complete(const ProviderCall& call) override {
    std::lock_guard lock(mu_);
    ++calls_;
    if (const auto it = by_digest_.find(call.digest); it != by_digest_.end()) return it->second;
    if (auto it = scripted_.find(call.template_id); it != scripted_.end() && !it->second.empty()) {
      std::string text = std::move(it->second.front());
      it->second.pop_front();
      return text;
    }
    fail(Errc::ProviderUnavailable,
         "no fixture for template '" + call.template_id + "' digest " + call.digest);
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> by_digest_;
  std::map<std::string, std::deque<std::string>> scripted_;
  std::size_t calls_ = 0;
};

/// Forwards to another provider and appends each answered exchange to a
/// JSONL fixture file, ready for MockProvider.
class RecordingProvider : public Provider {
 public:
  RecordingProvider(std::shared_ptr<Provider> inner, std::filesystem::path path)
      : inner_(std::move(inner)), path_(std::move(path)) {}

  std::string complete(const ProviderCall& call) override {
    std::string text = inner_->complete(call);
    std::lock_guard lock(mu_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << nlohmann::json{{"digest", call.digest}, {"template_id", call.template_id}, {"response_text", text}}
               .dump()
        << '\n';
    return text;
  }

 private:
  std::shared_ptr<Provider> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
};

}  // namespace crux::llm
