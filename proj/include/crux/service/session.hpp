#pragma once

// Curation sessions and their on-disk store. One JSON document per session
// and per puzzle under a data directory.

#include <cctype>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/types.hpp"

namespace crux::service {

enum class PairStatus { pending, accepted, rejected, edited };

constexpr std::string_view to_string(PairStatus s) {
  switch (s) {
    case PairStatus::pending: return "pending";
    case PairStatus::accepted: return "accepted";
    case PairStatus::rejected: return "rejected";
    case PairStatus::edited: return "edited";
  }
  return "pending";
}

inline std::optional<PairStatus> parse_status(std::string_view s) {
  if (s == "pending") return PairStatus::pending;
  if (s == "accepted") return PairStatus::accepted;
  if (s == "rejected") return PairStatus::rejected;
  if (s == "edited") return PairStatus::edited;
  return std::nullopt;
}

/// pending -> accepted | rejected | edited, edited -> accepted | rejected.
inline bool transition_allowed(PairStatus from, PairStatus to) {
  if (from == PairStatus::pending) return to != PairStatus::pending;
  if (from == PairStatus::edited) return to == PairStatus::accepted || to == PairStatus::rejected;
  return false;
}

struct SessionPair {
  std::string pair_id;
  /// As produced; `pair.clue` is never overwritten by an edit.
  ClueAnswerPair pair;
  PairStatus status = PairStatus::pending;
  std::optional<std::string> edited_clue;
  bool preferred = false;
  std::optional<QualityVerdict> verdict;

  const std::string& clue() const { return edited_clue ? *edited_clue : pair.clue; }
  /// Whether the pair may go into a schema.
  bool usable() const {
    return status == PairStatus::accepted || status == PairStatus::edited;
  }
};

struct CurationSession {
  std::string session_id;
  std::string created_at;
  /// "path_a" or "path_b".
  std::string origin;
  std::vector<SessionPair> pairs;
  std::vector<std::string> puzzles;
  nlohmann::json report = nlohmann::json::object();

  SessionPair& find_pair(const std::string& pair_id) {
    for (auto& p : pairs) {
      if (p.pair_id == pair_id) return p;
    }
    fail(Errc::UnknownPair, "no pair " + pair_id + " in session " + session_id, pair_id);
  }
};

inline void to_json(nlohmann::json& j, const SessionPair& p) {
  j = nlohmann::json{{"pair_id", p.pair_id},
                     {"clue", p.clue()},
                     {"original_clue", p.pair.clue},
                     {"answer", p.pair.answer_display},
                     {"answer_grid", p.pair.answer_grid},
                     {"source", to_string(p.pair.source)},
                     {"language", to_string(p.pair.language)},
                     {"status", to_string(p.status)},
                     {"preferred", p.preferred}};
  if (p.edited_clue) j["edited_clue"] = *p.edited_clue;
  if (p.verdict) j["verdict"] = *p.verdict;
}

inline void from_json(const nlohmann::json& j, SessionPair& p) {
  p.pair_id = j.at("pair_id").get<std::string>();
  p.pair = ClueAnswerPair::make(j.at("original_clue").get<std::string>(), j.at("answer").get<std::string>(),
                                parse_source(j.value("source", "corpus")).value_or(Source::corpus),
                                parse_language(j.value("language", "it")).value_or(Language::it));
  p.status = parse_status(j.at("status").get<std::string>()).value_or(PairStatus::pending);
  p.edited_clue.reset();
  if (j.contains("edited_clue")) p.edited_clue = j.at("edited_clue").get<std::string>();
  p.preferred = j.value("preferred", false);
  p.verdict.reset();
  if (j.contains("verdict")) p.verdict = j.at("verdict").get<QualityVerdict>();
}

inline void to_json(nlohmann::json& j, const CurationSession& s) {
  j = nlohmann::json{{"session_id", s.session_id}, {"created_at", s.created_at}, {"origin", s.origin},
                     {"pairs", s.pairs},           {"puzzles", s.puzzles},       {"report", s.report}};
}

inline void from_json(const nlohmann::json& j, CurationSession& s) {
  s.session_id = j.at("session_id").get<std::string>();
  s.created_at = j.value("created_at", "");
  s.origin = j.value("origin", "");
  s.pairs = j.at("pairs").get<std::vector<SessionPair>>();
  s.puzzles = j.value("puzzles", std::vector<std::string>{});
  s.report = j.value("report", nlohmann::json::object());
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Sessions and puzzles as JSON files. Writes go to a temp file first and
/// are renamed into place. `lock(id)` hands out one mutex per session so
/// read-modify-write cycles on the same session do not interleave.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_ / "sessions");
    std::filesystem::create_directories(root_ / "puzzles");
  }

  const std::filesystem::path& root() const { return root_; }

  std::string new_id(char prefix) {
    std::lock_guard lk(mu_);
    std::uniform_int_distribution<std::uint64_t> dist;
    std::ostringstream os;
    os << prefix << std::hex << dist(ids_);
    return os.str();
  }

  std::mutex& lock(const std::string& session_id) {
    std::lock_guard lk(mu_);
    auto& m = locks_[session_id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  void save(const CurationSession& s) { write(path("sessions", s.session_id), nlohmann::json(s).dump(2)); }

  CurationSession load(const std::string& id) {
    const auto p = path("sessions", id);
    if (!valid_id(id) || !std::filesystem::exists(p)) fail(Errc::UnknownSession, "no session " + id, id);
    return nlohmann::json::parse(read(p)).get<CurationSession>();
  }

  void save_puzzle(const std::string& id, const std::string& json) { write(path("puzzles", id), json); }

  std::string load_puzzle(const std::string& id) {
    const auto p = path("puzzles", id);
    if (!valid_id(id) || !std::filesystem::exists(p)) fail(Errc::UnknownPuzzle, "no puzzle " + id, id);
    return read(p);
  }

 private:
  // Ids name files, so only plain alphanumerics get near the filesystem.
  static bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
      if (!std::isalnum(static_cast<unsigned char>(c))) return false;
    }
    return true;
  }

  std::filesystem::path path(const char* kind, const std::string& id) const { return root_ / kind / (id + ".json"); }

  static std::string read(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  static void write(const std::filesystem::path& p, const std::string& body) {
    auto tmp = p;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << body;
      if (!out) fail(Errc::InvalidArgument, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
  }

  std::filesystem::path root_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
  std::mt19937_64 ids_{std::random_device{}()};
};

}  // namespace crux::service
