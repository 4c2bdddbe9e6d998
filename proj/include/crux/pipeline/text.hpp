#pragma once

// Clue-answer pairs from running text: paragraphs -> keywords -> length
// filter -> clues -> True/False validation against the source paragraph.

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/text.hpp"
#include "crux/core/types.hpp"
#include "crux/llm/gateway.hpp"

namespace crux::pipeline {

struct Paragraph {
  std::string text;
  std::size_t index = 0;
  std::string source_id;

  friend bool operator==(const Paragraph&, const Paragraph&) = default;
};

/// A stage failure tagged with where it happened.
class PipelineError : public Error {
 public:
  PipelineError(const Error& cause, std::string stage, std::size_t paragraph)
      : Error(cause.code(), "[" + stage + " paragraph " + std::to_string(paragraph) + "] " + cause.message(),
              cause.payload()),
        stage_(std::move(stage)),
        paragraph_(paragraph) {}

  const std::string& stage() const noexcept { return stage_; }
  std::size_t paragraph() const noexcept { return paragraph_; }

 private:
  std::string stage_;
  std::size_t paragraph_;
};

/// Splits on blank lines. A fragment shorter than `min_len` characters is
/// merged into the fragment after it; a short tail joins the last paragraph.
inline std::vector<Paragraph> split_paragraphs(std::string_view document, std::size_t min_len = 200,
                                               const std::string& source_id = "document") {
  std::vector<std::string> fragments;
  std::string current;
  for (auto line : text::split_lines(document)) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) {
      if (!current.empty()) fragments.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current.push_back('\n');
    current.append(trimmed);
  }
  if (!current.empty()) fragments.push_back(std::move(current));
  if (fragments.empty()) fail(Errc::EmptyDocument, "document has no text");

  std::vector<Paragraph> out;
  std::string pending;
  for (auto& fragment : fragments) {
    if (!pending.empty()) pending.push_back('\n');
    pending.append(fragment);
    if (text::utf8_length(pending) >= min_len) {
      out.push_back({std::move(pending), out.size(), source_id});
      pending.clear();
    }
  }
  if (!pending.empty()) {
    if (out.empty()) {
      fail(Errc::EmptyDocument, "document is shorter than " + std::to_string(min_len) + " characters");
    }
    out.back().text += "\n" + pending;
  }
  return out;
}

namespace detail {

inline std::string_view strip_bullet(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '#' || s.front() == '>')) {
    s.remove_prefix(1);
    s = text::trim(s);
  }
  std::size_t digits = 0;
  while (digits < s.size() && s[digits] >= '0' && s[digits] <= '9') ++digits;
  if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')' || s[digits] == '-')) {
    s = text::trim(s.substr(digits + 1));
  }
  return s;
}

inline std::string strip_decoration(std::string_view s) {
  std::string out(text::trim(s));
  auto erase_all = [&](std::string_view what) {
    for (auto pos = out.find(what); pos != std::string::npos; pos = out.find(what)) out.erase(pos, what.size());
  };
  erase_all("**");
  erase_all("`");
  out = std::string(text::trim(out));
  auto strip_pair = [&](std::string_view open, std::string_view close) {
    if (out.size() >= open.size() + close.size() && out.starts_with(open) && out.ends_with(close)) {
      out = std::string(text::trim(out.substr(open.size(), out.size() - open.size() - close.size())));
    }
  };
  strip_pair("\"", "\"");
  strip_pair("\xE2\x80\x9C", "\xE2\x80\x9D");
  strip_pair("'", "'");
  return out;
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline bool is_keyword_label(std::string_view label) {
  const auto l = lower_ascii(text::trim(label));
  return l == "keywords" || l == "final keywords" || l == "parole chiave" || l == "parole chiave finali";
}

inline std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.append(sep);
    out.append(items[i]);
  }
  return out;
}

}  // namespace detail

/// Parses the last "Keywords:" / "Parole chiave:" line of a response into a
/// comma-separated list; trims, drops empties and case-insensitive repeats.
inline std::vector<std::string> parse_keywords(std::string_view response) {
  std::optional<std::string_view> payload;
  for (auto line : text::split_lines(response)) {
    const auto s = detail::strip_bullet(line);
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) continue;
    std::string label = detail::strip_decoration(s.substr(0, colon));
    if (detail::is_keyword_label(label)) payload = s.substr(colon + 1);
  }
  if (!payload) fail(Errc::ParseFailure, "no keyword line in response", std::string(response));

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto part : text::split(*payload, ',')) {
    std::string kw = detail::strip_decoration(part);
    while (!kw.empty() && (kw.back() == '.' || kw.back() == ';')) kw.pop_back();
    kw = std::string(text::trim(kw));
    if (kw.empty()) continue;
    if (seen.insert(text::casefold_collapse(kw)).second) out.push_back(std::move(kw));
  }
  return out;
}

struct KeywordExtraction {
  std::vector<std::string> keywords;
  std::string digest;
};

inline std::string keyword_template(Language lang) { return lang == Language::it ? "kw_it" : "kw_en"; }
inline std::string clue_template(Language lang) { return lang == Language::it ? "clue_it" : "clue_en"; }
inline std::string check_template(Language lang) { return lang == Language::it ? "check_it" : "check_en"; }

inline KeywordExtraction extract_keywords(llm::Gateway& gateway, const Paragraph& p, Language lang,
                                          const std::string& model_id = "gpt-4o-mini") {
  const auto id = keyword_template(lang);
  auto ex = gateway.complete({id, {{"text", p.text}}, llm::default_params(id, model_id)});
  return {parse_keywords(ex.response_text), ex.digest};
}

/// Keeps keywords of at most three whitespace-separated words.
inline std::vector<std::string> filter_keywords(const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  std::copy_if(keywords.begin(), keywords.end(), std::back_inserter(out),
               [](const std::string& k) { return text::count_words(k) <= 3; });
  return out;
}

struct ClueGeneration {
  /// In keyword order, self-containing clues already removed.
  std::vector<ClueAnswerPair> pairs;
  /// Number of keywords that received a parsed clue.
  std::size_t parsed = 0;
  std::vector<std::string> missing;
  std::vector<std::string> self_contained;
  std::vector<std::string> unusable;
  std::string digest;
};

/// Parses "Keyword: clue" lines (also tolerating "clue: Keyword") against
/// the requested keywords, matched case- and accent-insensitively.
inline ClueGeneration parse_clues(std::string_view response, const std::vector<std::string>& keywords,
                                  Language lang, Source source = Source::path_a) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < keywords.size(); ++i) index.emplace(text::fold_letters(keywords[i]), i);

  std::vector<std::optional<std::string>> clue_for(keywords.size());
  for (auto line : text::split_lines(response)) {
    const auto s = detail::strip_bullet(line);
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) continue;
    std::string left = detail::strip_decoration(s.substr(0, colon));
    std::string right = detail::strip_decoration(s.substr(colon + 1));
    if (left.empty() || right.empty()) continue;
    auto it = index.find(text::fold_letters(left));
    if (it == index.end()) {
      it = index.find(text::fold_letters(right));
      if (it == index.end()) continue;
      std::swap(left, right);
    }
    if (!clue_for[it->second]) clue_for[it->second] = right;
  }

  ClueGeneration out;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (!clue_for[i]) {
      out.missing.push_back(keywords[i]);
      continue;
    }
    ++out.parsed;
    ClueAnswerPair pair;
    try {
      pair = ClueAnswerPair::make(*clue_for[i], keywords[i], source, lang);
    } catch (const Error&) {
      out.unusable.push_back(keywords[i]);
      continue;
    }
    if (pair.self_contained()) {
      out.self_contained.push_back(keywords[i]);
      continue;
    }
    out.pairs.push_back(std::move(pair));
  }
  if (out.parsed == 0) fail(Errc::ParseFailure, "no clue line matched a keyword", std::string(response));
  return out;
}

inline ClueGeneration generate_clues(llm::Gateway& gateway, const Paragraph& p,
                                     const std::vector<std::string>& keywords, Language lang,
                                     const std::string& model_id = "gpt-4o-mini") {
  if (keywords.empty()) fail(Errc::InvalidArgument, "no keywords to write clues for");
  const auto id = clue_template(lang);
  auto ex = gateway.complete(
      {id, {{"keywords", detail::join(keywords, ", ")}, {"text", p.text}}, llm::default_params(id, model_id)});
  auto out = parse_clues(ex.response_text, keywords, lang);
  out.digest = ex.digest;
  return out;
}

/// One verdict per non-empty line that carries a True/False (or Vero/Falso)
/// token; the first such token on a line wins.
inline std::vector<bool> parse_truth_tokens(std::string_view response) {
  std::vector<bool> verdicts;
  for (auto line : text::split_lines(response)) {
    std::string word;
    std::optional<bool> verdict;
    auto flush = [&] {
      if (!verdict && !word.empty()) {
        const auto w = detail::lower_ascii(word);
        if (w == "true" || w == "vero") verdict = true;
        else if (w == "false" || w == "falso") verdict = false;
      }
      word.clear();
    };
    for (char c : line) {
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
        word.push_back(c);
      } else {
        flush();
      }
    }
    flush();
    if (verdict) verdicts.push_back(*verdict);
  }
  return verdicts;
}

struct TruthCheck {
  std::vector<ClueAnswerPair> kept;
  std::vector<bool> verdicts;
  std::string digest;
};

/// Asks whether each clue is supported by the paragraph. A response whose
/// verdict count does not match the clue count is a ParseFailure: nothing is
/// kept.
inline TruthCheck truth_check(llm::Gateway& gateway, const std::vector<ClueAnswerPair>& pairs,
                              const Paragraph& p, Language lang, const std::string& model_id = "gpt-4o-mini") {
  if (pairs.empty()) fail(Errc::InvalidArgument, "no clues to check");
  std::vector<std::string> clues;
  for (const auto& pair : pairs) clues.push_back(pair.clue);
  const auto id = check_template(lang);
  auto ex = gateway.complete(
      {id, {{"clue", detail::join(clues, "\n")}, {"text", p.text}}, llm::default_params(id, model_id)});
  TruthCheck out;
  out.digest = ex.digest;
  out.verdicts = parse_truth_tokens(ex.response_text);
  if (out.verdicts.size() != pairs.size()) {
    fail(Errc::ParseFailure,
         "expected " + std::to_string(pairs.size()) + " verdicts, found " + std::to_string(out.verdicts.size()),
         ex.response_text);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (out.verdicts[i]) out.kept.push_back(pairs[i]);
  }
  return out;
}

struct PathAConfig {
  Language language = Language::en;
  std::size_t min_paragraph_chars = 200;
  std::string model_id = "gpt-4o-mini";
  /// Paragraphs processed at once; the gateway still caps in-flight calls.
  std::size_t max_parallel = 1;
  /// Record a failing paragraph in the report and move on instead of throwing.
  bool skip_failed_paragraphs = false;
};

struct ParagraphFailure {
  std::size_t paragraph = 0;
  std::string stage;
  std::string error_code;
  std::string message;
};

struct PipelineRunReport {
  std::size_t paragraphs = 0;
  std::size_t keywords_extracted = 0;
  std::size_t keywords_kept = 0;
  std::size_t clues_generated = 0;
  std::size_t clues_self_contained = 0;
  std::size_t clues_checked = 0;
  std::size_t clues_kept = 0;
  std::vector<std::string> missing_keywords;
  std::vector<ParagraphFailure> failures;
  std::vector<std::string> digests;
};

inline void to_json(nlohmann::json& j, const PipelineRunReport& r) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : r.failures) {
    failures.push_back(
        {{"paragraph", f.paragraph}, {"stage", f.stage}, {"error_code", f.error_code}, {"message", f.message}});
  }
  j = nlohmann::json{{"paragraphs", r.paragraphs},
                     {"keywords_extracted", r.keywords_extracted},
                     {"keywords_kept", r.keywords_kept},
                     {"clues_generated", r.clues_generated},
                     {"clues_self_contained", r.clues_self_contained},
                     {"clues_checked", r.clues_checked},
                     {"clues_kept", r.clues_kept},
                     {"missing_keywords", r.missing_keywords},
                     {"failures", failures},
                     {"digests", r.digests}};
}

struct PathAResult {
  std::vector<ClueAnswerPair> pairs;
  PipelineRunReport report;
};

namespace detail {

struct ParagraphRun {
  std::vector<ClueAnswerPair> pairs;
  PipelineRunReport report;
  std::optional<PipelineError> error;
};

inline ParagraphRun run_paragraph(llm::Gateway& gateway, const Paragraph& p, const PathAConfig& cfg) {
  ParagraphRun run;
  auto& r = run.report;
  std::string stage = "keywords";
  try {
    auto kw = extract_keywords(gateway, p, cfg.language, cfg.model_id);
    r.digests.push_back(kw.digest);
    r.keywords_extracted = kw.keywords.size();

    stage = "filter";
    const auto kept = filter_keywords(kw.keywords);
    r.keywords_kept = kept.size();
    if (kept.empty()) return run;

    stage = "clues";
    auto clues = generate_clues(gateway, p, kept, cfg.language, cfg.model_id);
    r.digests.push_back(clues.digest);
    r.clues_generated = clues.parsed;
    r.clues_self_contained = clues.self_contained.size();
    r.missing_keywords = clues.missing;
    if (clues.pairs.empty()) return run;

    stage = "truth_check";
    r.clues_checked = clues.pairs.size();
    auto checked = truth_check(gateway, clues.pairs, p, cfg.language, cfg.model_id);
    r.digests.push_back(checked.digest);
    r.clues_kept = checked.kept.size();
    run.pairs = std::move(checked.kept);
  } catch (const Error& e) {
    run.error.emplace(e, stage, p.index);
    run.pairs.clear();
    r.clues_kept = 0;
  }
  return run;
}

}  // namespace detail

/// Runs every stage over every paragraph. Results merge in paragraph order
/// regardless of how many paragraphs ran concurrently.
inline PathAResult run_path_a(llm::Gateway& gateway, std::string_view document, const PathAConfig& cfg = {}) {
  PathAResult result;
  std::vector<Paragraph> paragraphs;
  try {
    paragraphs = split_paragraphs(document, cfg.min_paragraph_chars);
  } catch (const Error& e) {
    throw PipelineError(e, "split", 0);
  }
  result.report.paragraphs = paragraphs.size();

  std::vector<detail::ParagraphRun> runs(paragraphs.size());
  const std::size_t width = std::max<std::size_t>(1, cfg.max_parallel);
  for (std::size_t start = 0; start < paragraphs.size(); start += width) {
    const std::size_t end = std::min(paragraphs.size(), start + width);
    if (end - start == 1) {
      runs[start] = detail::run_paragraph(gateway, paragraphs[start], cfg);
      continue;
    }
    std::vector<std::future<detail::ParagraphRun>> futures;
    for (std::size_t i = start; i < end; ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] {
        return detail::run_paragraph(gateway, paragraphs[i], cfg);
      }));
    }
    for (std::size_t i = start; i < end; ++i) runs[i] = futures[i - start].get();
  }

  auto& total = result.report;
  for (auto& run : runs) {
    if (run.error) {
      if (!cfg.skip_failed_paragraphs) throw *run.error;
      total.failures.push_back({run.error->paragraph(), run.error->stage(),
                                std::string(to_string(run.error->code())), run.error->what()});
    }
    const auto& r = run.report;
    total.keywords_extracted += r.keywords_extracted;
    total.keywords_kept += r.keywords_kept;
    total.clues_generated += r.clues_generated;
    total.clues_self_contained += r.clues_self_contained;
    total.clues_checked += r.clues_checked;
    total.clues_kept += r.clues_kept;
    total.missing_keywords.insert(total.missing_keywords.end(), r.missing_keywords.begin(),
                                  r.missing_keywords.end());
    total.digests.insert(total.digests.end(), r.digests.begin(), r.digests.end());
    for (auto& pair : run.pairs) result.pairs.push_back(std::move(pair));
  }
  return result;
}

}  // namespace crux::pipeline
