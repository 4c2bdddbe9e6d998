#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/text.hpp"

namespace crux {

enum class Source { corpus, path_a, path_b, manual };
enum class Language { it, en };
enum class Label { acceptable, unacceptable, unlabeled };

constexpr std::string_view to_string(Source s) {
  switch (s) {
    case Source::corpus: return "corpus";
    case Source::path_a: return "path_a";
    case Source::path_b: return "path_b";
    case Source::manual: return "manual";
  }
  return "corpus";
}

constexpr std::string_view to_string(Language l) { return l == Language::it ? "it" : "en"; }

constexpr std::string_view to_string(Label l) {
  switch (l) {
    case Label::acceptable: return "acceptable";
    case Label::unacceptable: return "unacceptable";
    case Label::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

inline std::optional<Source> parse_source(std::string_view s) {
  if (s == "corpus" || s.empty()) return Source::corpus;
  if (s == "path_a") return Source::path_a;
  if (s == "path_b") return Source::path_b;
  if (s == "manual") return Source::manual;
  return std::nullopt;
}

inline std::optional<Language> parse_language(std::string_view s) {
  if (s == "it") return Language::it;
  if (s == "en") return Language::en;
  return std::nullopt;
}

inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "acceptable" || s == "yes" || s == "true" || s == "1") return Label::acceptable;
  if (s == "unacceptable" || s == "no" || s == "false" || s == "0") return Label::unacceptable;
  if (s == "unlabeled" || s.empty()) return Label::unlabeled;
  return std::nullopt;
}

struct ClueAnswerPair {
  std::string clue;
  std::string answer_display;
  std::string answer_grid;
  Source source = Source::corpus;
  Language language = Language::it;
  std::optional<Label> label;

  /// Builds a pair with `answer_grid` derived from the display form.
  static ClueAnswerPair make(std::string clue, std::string answer_display,
                             Source source = Source::corpus, Language language = Language::it,
                             std::optional<Label> label = std::nullopt) {
    ClueAnswerPair p;
    p.answer_grid = text::normalize_answer(answer_display);
    p.clue = std::move(clue);
    p.answer_display = std::move(answer_display);
    p.source = source;
    p.language = language;
    p.label = label;
    return p;
  }

  bool self_contained() const { return text::clue_contains_answer(clue, answer_grid); }

  friend bool operator==(const ClueAnswerPair&, const ClueAnswerPair&) = default;
};

struct QualityVerdict {
  bool accepted = false;
  std::optional<std::string> rationale;
  std::string judge_id;

  friend bool operator==(const QualityVerdict&, const QualityVerdict&) = default;
};

inline void to_json(nlohmann::json& j, const ClueAnswerPair& p) {
  j = nlohmann::json{{"clue", p.clue},
                     {"answer", p.answer_display},
                     {"answer_grid", p.answer_grid},
                     {"source", to_string(p.source)},
                     {"language", to_string(p.language)}};
  if (p.label) j["label"] = to_string(*p.label);
}

inline void from_json(const nlohmann::json& j, ClueAnswerPair& p) {
  const auto source = parse_source(j.value("source", "corpus"));
  const auto language = parse_language(j.value("language", "it"));
  if (!source || !language) fail(Errc::InvalidArgument, "bad source or language in pair");
  std::optional<Label> label;
  if (j.contains("label")) {
    label = parse_label(j.at("label").get<std::string>());
    if (!label) fail(Errc::InvalidArgument, "bad label in pair");
  }
  p = ClueAnswerPair::make(j.at("clue").get<std::string>(), j.at("answer").get<std::string>(),
                           *source, *language, label);
}

inline void to_json(nlohmann::json& j, const QualityVerdict& v) {
  j = nlohmann::json{{"accepted", v.accepted}, {"judge_id", v.judge_id}};
  if (v.rationale) j["rationale"] = *v.rationale;
}

inline void from_json(const nlohmann::json& j, QualityVerdict& v) {
  v.accepted = j.at("accepted").get<bool>();
  v.judge_id = j.at("judge_id").get<std::string>();
  if (j.contains("rationale")) v.rationale = j.at("rationale").get<std::string>();
}

}  // namespace crux
