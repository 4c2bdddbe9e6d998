#pragma once

// What the HTTP endpoints do, minus the HTTP. Every method takes and
// returns JSON and reports problems by throwing crux::Error.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/types.hpp"
#include "crux/llm/gateway.hpp"
#include "crux/pipeline/keyword.hpp"
#include "crux/pipeline/text.hpp"
#include "crux/schema/generator.hpp"
#include "crux/service/puzzle.hpp"
#include "crux/service/session.hpp"

namespace crux::service {

/// Fills a GenerationConfig from a JSON object; absent keys keep defaults.
/// The duration may be given as max_seconds or max_duration_ms.
inline schema::GenerationConfig config_from_json(const nlohmann::json& j, schema::GenerationConfig c = {}) {
  if (j.is_null()) return c;
  if (!j.is_object()) fail(Errc::InvalidArgument, "config must be an object");
  try {
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.min_words = j.value("min_words", c.min_words);
    c.min_fill_ratio = j.value("min_fill_ratio", j.value("min_fill", c.min_fill_ratio));
    c.max_restarts = j.value("max_restarts", c.max_restarts);
    if (j.contains("max_seconds")) {
      c.max_duration = std::chrono::milliseconds(static_cast<long>(j.at("max_seconds").get<double>() * 1000.0));
    }
    if (j.contains("max_duration_ms")) c.max_duration = std::chrono::milliseconds(j.at("max_duration_ms").get<long>());
    c.preferred_weight = j.value("preferred_weight", c.preferred_weight);
    c.removal_probability = j.value("removal_probability", c.removal_probability);
    c.seed = j.value("seed", c.seed);
    if (j.contains("fr_denominator")) {
      const auto d = j.at("fr_denominator").get<std::string>();
      if (d == "bbox") {
        c.fr_denominator = schema::FrDenominator::bbox;
      } else if (d == "work_area") {
        c.fr_denominator = schema::FrDenominator::work_area;
      } else {
        fail(Errc::InvalidArgument, "fr_denominator must be bbox or work_area");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidArgument, std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

struct ServiceOptions {
  pipeline::PathAConfig path_a;
  /// Few-shot pool for keyword-driven generation; may be empty.
  std::vector<ClueAnswerPair> exemplars;
  std::size_t exemplar_count = 10;
  std::uint64_t exemplar_seed = 42;
  /// Attach a judge verdict to every keyword-driven pair.
  bool judge_keyword_pairs = false;
  pipeline::JudgeBackend judge;
};

class Service {
 public:
  Service(llm::Gateway& gateway, std::filesystem::path data_dir, ServiceOptions options = {})
      : gateway_(gateway), store_(std::move(data_dir)), options_(std::move(options)) {}

  SessionStore& store() { return store_; }

  /// {document, lang?} -> new session holding the surviving path (a) pairs.
  nlohmann::json text_session(const nlohmann::json& body) {
    const auto document = string_field(body, "document");
    auto cfg = options_.path_a;
    if (body.contains("lang")) cfg.language = language_field(body, "lang");
    auto result = pipeline::run_path_a(gateway_, document, cfg);
    CurationSession s = fresh("path_a");
    s.report = result.report;
    for (auto& p : result.pairs) add_pair(s, std::move(p));
    store_.save(s);
    return s;
  }

  /// {keywords: [..], n?} -> new session holding path (b) candidates.
  nlohmann::json keyword_session(const nlohmann::json& body) {
    if (!body.is_object() || !body.contains("keywords") || !body.at("keywords").is_array()) {
      fail(Errc::InvalidArgument, "keywords must be an array of strings");
    }
    std::size_t n = 3;
    if (body.contains("n")) {
      if (!body.at("n").is_number_integer() || body.at("n").get<long>() < 1) {
        fail(Errc::InvalidArgument, "n must be a positive integer");
      }
      n = body.at("n").get<std::size_t>();
    }
    pipeline::KeywordGenParams params;
    params.exemplars = pipeline::sample_exemplars(options_.exemplars, options_.exemplar_count, options_.exemplar_seed);
    pipeline::GatewayJudge judge(gateway_, options_.judge);

    CurationSession s = fresh("path_b");
    std::size_t generated = 0;
    for (const auto& k : body.at("keywords")) {
      if (!k.is_string()) fail(Errc::InvalidArgument, "keywords must be an array of strings");
      auto pairs = pipeline::generate_clues_for_keyword(gateway_, k.get<std::string>(), n, params);
      generated += pairs.size();
      for (auto& p : pairs) {
        std::optional<QualityVerdict> verdict;
        if (options_.judge_keyword_pairs) verdict = pipeline::judge_pair(p, judge);
        add_pair(s, std::move(p)).verdict = std::move(verdict);
      }
    }
    s.report = {{"keywords", body.at("keywords").size()}, {"clues_generated", generated}};
    store_.save(s);
    return s;
  }

  nlohmann::json get_session(const std::string& id) { return store_.load(id); }

  /// {status?, edited_clue?, preferred?} -> the updated pair.
  nlohmann::json patch_pair(const std::string& session_id, const std::string& pair_id, const nlohmann::json& body) {
    if (!body.is_object()) fail(Errc::InvalidArgument, "body must be an object");
    std::lock_guard lk(store_.lock(session_id));
    auto s = store_.load(session_id);
    auto& pair = s.find_pair(pair_id);

    std::optional<std::string> edited;
    if (body.contains("edited_clue") && !body.at("edited_clue").is_null()) {
      edited = string_field(body, "edited_clue");
      if (text::trim(*edited).empty()) fail(Errc::InvalidArgument, "edited_clue must not be empty");
    }
    if (body.contains("status")) {
      const auto status = parse_status(string_field(body, "status"));
      if (!status) fail(Errc::InvalidArgument, "unknown status");
      if (!transition_allowed(pair.status, *status)) {
        fail(Errc::InvalidStatusTransition, std::string("cannot go from ") + std::string(to_string(pair.status)) +
                                                " to " + std::string(to_string(*status)));
      }
      if (*status == PairStatus::edited && !edited) fail(Errc::InvalidArgument, "status edited needs edited_clue");
      if (*status != PairStatus::edited && edited) fail(Errc::InvalidArgument, "edited_clue goes with status edited");
      pair.status = *status;
      if (edited) pair.edited_clue = edited;
    } else if (edited) {
      fail(Errc::InvalidArgument, "edited_clue goes with status edited");
    }
    if (body.contains("preferred")) {
      if (!body.at("preferred").is_boolean()) fail(Errc::InvalidArgument, "preferred must be a boolean");
      pair.preferred = body.at("preferred").get<bool>();
    }
    const nlohmann::json out = pair;
    store_.save(s);
    return out;
  }

  /// {config?} -> {puzzle_id, score, stop, restarts, inputs, puzzle}.
  nlohmann::json generate(const std::string& session_id, const nlohmann::json& body) {
    const auto cfg = config_from_json(body.is_object() && body.contains("config") ? body.at("config") : nlohmann::json());
    std::lock_guard lk(store_.lock(session_id));
    auto s = store_.load(session_id);

    std::vector<ClueAnswerPair> pool;
    std::set<std::string> preferred;
    for (const auto& p : s.pairs) {
      if (!p.usable()) continue;
      auto pair = p.pair;
      pair.clue = p.clue();
      if (p.preferred) preferred.insert(pair.answer_grid);
      pool.push_back(std::move(pair));
    }
    const auto result = schema::generate(pool, preferred, cfg);
    const auto puzzle = assign_numbering(result.grid, pool, result.score);
    const auto json_text = export_puzzle(puzzle, ExportFormat::json);

    const auto puzzle_id = store_.new_id('z');
    store_.save_puzzle(puzzle_id, json_text);
    s.puzzles.push_back(puzzle_id);
    store_.save(s);
    return {{"puzzle_id", puzzle_id},
            {"score", result.score},
            {"stop", to_string(result.stop)},
            {"restarts", result.restarts},
            {"inputs", result.inputs},
            {"puzzle", nlohmann::json::parse(json_text)}};
  }

  /// The stored puzzle, as JSON text or printable text.
  std::string export_stored(const std::string& puzzle_id, ExportFormat format) {
    const auto json_text = store_.load_puzzle(puzzle_id);
    if (format == ExportFormat::json) return json_text;
    return render_text(puzzle_from_json(nlohmann::json::parse(json_text)));
  }

 private:
  static std::string string_field(const nlohmann::json& body, const char* key) {
    if (!body.is_object() || !body.contains(key) || !body.at(key).is_string()) {
      fail(Errc::InvalidArgument, std::string(key) + " must be a string");
    }
    return body.at(key).get<std::string>();
  }

  static Language language_field(const nlohmann::json& body, const char* key) {
    const auto lang = parse_language(string_field(body, key));
    if (!lang) fail(Errc::InvalidArgument, std::string(key) + " must be it or en");
    return *lang;
  }

  CurationSession fresh(std::string origin) {
    CurationSession s;
    s.session_id = store_.new_id('s');
    s.created_at = utc_timestamp();
    s.origin = std::move(origin);
    return s;
  }

  static SessionPair& add_pair(CurationSession& s, ClueAnswerPair p) {
    SessionPair sp;
    sp.pair_id = "p" + std::to_string(s.pairs.size() + 1);
    sp.pair = std::move(p);
    s.pairs.push_back(std::move(sp));
    return s.pairs.back();
  }

  llm::Gateway& gateway_;
  SessionStore store_;
  ServiceOptions options_;
};

}  // namespace crux::service
