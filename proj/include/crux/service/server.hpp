#pragma once

// HTTP front for Service.

#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/service/service.hpp"

namespace crux::service {

inline int http_status(Errc code) {
  switch (code) {
    case Errc::UnknownSession:
    case Errc::UnknownPair:
    case Errc::UnknownPuzzle:
    case Errc::FileNotFound:
      return 404;
    case Errc::InvalidStatusTransition:
      return 409;
    case Errc::NoSolution:
    case Errc::PoolTooSmall:
    case Errc::MissingClue:
    case Errc::AnswerTooLong:
    case Errc::AnswerTooShort:
      return 422;
    case Errc::ProviderUnavailable:
    case Errc::RateLimited:
      return 503;
    case Errc::AuthMissing:
    case Errc::ProviderRejected:
    case Errc::ParseFailure:
      return 502;
    default:
      return 400;
  }
}

class Server {
 public:
  explicit Server(Service& service) : service_(service) { routes(); }

  ~Server() { stop(); }

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? http_.bind_to_any_port(host) : (http_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) fail(Errc::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
    return port_;
  }

  /// Serves on the calling thread until stop() is called from elsewhere.
  bool listen(const std::string& host, int port) { return http_.listen(host, port); }

  void stop() {
    http_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    auto j = nlohmann::json::parse(req.body, nullptr, false);
    if (j.is_discarded()) fail(Errc::InvalidArgument, "request body is not valid JSON");
    return j;
  }

  // Maps library errors to their HTTP status, anything else to 500.
  static Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_json(res, http_status(e.code()), {{"error_code", to_string(e.code())}, {"message", e.message()}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error_code", "Internal"}, {"message", e.what()}});
      }
    };
  }

  void routes() {
    http_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                               {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                               {"Access-Control-Allow-Headers", "Content-Type"}});
    http_.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http_.Post("/api/pipeline/text", guarded([this](const auto& req, auto& res) {
                 send_json(res, 201, service_.text_session(parse_body(req)));
               }));
    http_.Post("/api/pipeline/keywords", guarded([this](const auto& req, auto& res) {
                 send_json(res, 201, service_.keyword_session(parse_body(req)));
               }));
    http_.Get(R"(/api/sessions/([^/]+))", guarded([this](const auto& req, auto& res) {
                send_json(res, 200, service_.get_session(req.matches[1]));
              }));
    http_.Patch(R"(/api/sessions/([^/]+)/pairs/([^/]+))", guarded([this](const auto& req, auto& res) {
                  send_json(res, 200, service_.patch_pair(req.matches[1], req.matches[2], parse_body(req)));
                }));
    http_.Post(R"(/api/sessions/([^/]+)/generate)", guarded([this](const auto& req, auto& res) {
                 send_json(res, 201, service_.generate(req.matches[1], parse_body(req)));
               }));
    http_.Get(R"(/api/puzzles/([^/]+))", guarded([this](const auto& req, auto& res) {
                const auto format = req.has_param("format") ? req.get_param_value("format") : "json";
                if (format != "json" && format != "text") fail(Errc::InvalidArgument, "format must be json or text");
                if (format == "json") {
                  res.set_content(service_.export_stored(req.matches[1], ExportFormat::json), "application/json");
                } else {
                  res.set_content(service_.export_stored(req.matches[1], ExportFormat::text), "text/plain; charset=utf-8");
                }
              }));
    http_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty() && res.status == 404) {
        res.set_content(R"({"error_code":"NotFound","message":"no such endpoint"})", "application/json");
      }
    });
  }

  Service& service_;
  httplib::Server http_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace crux::service
