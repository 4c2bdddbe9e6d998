#pragma once

// Clues from bare keywords, and acceptability judging of clue-answer pairs.

#include <algorithm>
#include <future>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crux/core/error.hpp"
#include "crux/core/metrics.hpp"
#include "crux/core/rng.hpp"
#include "crux/core/text.hpp"
#include "crux/core/types.hpp"
#include "crux/llm/gateway.hpp"
#include "crux/pipeline/text.hpp"

namespace crux::pipeline {

/// Figures reported for the fine-tuned generators and classifiers that this
/// library stands in for. Documentation only; nothing asserts against them.
namespace reference {
inline constexpr double davinci_acceptable_clue_rate = 0.601;
inline constexpr double curie_acceptable_clue_rate = 0.349;
inline constexpr double best_classifier_accuracy = 0.7988;
inline constexpr double best_classifier_precision = 0.8016;
inline constexpr double best_classifier_recall = 0.7667;
inline constexpr double best_classifier_f1 = 0.7838;
inline constexpr double worst_classifier_accuracy = 0.6562;
}  // namespace reference

struct KeywordGenParams {
  llm::ModelParams model = llm::default_params("pathb_gen");
  /// Few-shot corpus pairs shown before the target keyword.
  std::vector<ClueAnswerPair> exemplars;
};

/// Draws k exemplars without replacement, in a seed-determined order.
inline std::vector<ClueAnswerPair> sample_exemplars(const std::vector<ClueAnswerPair>& corpus, std::size_t k,
                                                    std::uint64_t seed) {
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<ClueAnswerPair> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(corpus[order[i]]);
  return out;
}

inline std::string format_exemplars(const std::vector<ClueAnswerPair>& exemplars) {
  std::string out;
  for (const auto& e : exemplars) out += e.answer_grid + ": " + e.clue + "\n";
  if (!out.empty()) out.pop_back();
  return out;
}

/// One candidate clue per line; bullets, numbering, quotes and a leading
/// "Keyword:" label are stripped.
inline std::vector<std::string> parse_candidate_clues(std::string_view response, std::string_view answer_grid) {
  std::vector<std::string> out;
  for (auto line : text::split_lines(response)) {
    auto s = detail::strip_bullet(line);
    if (const auto colon = s.find(':'); colon != std::string_view::npos) {
      const auto label = text::fold_letters(s.substr(0, colon));
      if (label == answer_grid || label == "CLUE" || label == "CLUES" || label == "DEFINIZIONE") {
        s = s.substr(colon + 1);
      }
    }
    auto clue = detail::strip_decoration(s);
    if (!clue.empty()) out.push_back(std::move(clue));
  }
  return out;
}

inline std::vector<ClueAnswerPair> generate_clues_for_keyword(llm::Gateway& gateway, const std::string& keyword,
                                                              std::size_t n, const KeywordGenParams& params = {}) {
  if (n < 1) fail(Errc::InvalidArgument, "n must be at least 1");
  const auto answer_grid = text::normalize_answer(keyword);
  auto ex = gateway.complete({"pathb_gen",
                              {{"examples", format_exemplars(params.exemplars)},
                               {"keyword", keyword},
                               {"n", std::to_string(n)}},
                              params.model});
  std::vector<ClueAnswerPair> out;
  std::set<std::string> seen;
  for (auto& clue : parse_candidate_clues(ex.response_text, answer_grid)) {
    if (out.size() >= n) break;
    auto pair = ClueAnswerPair::make(clue, keyword, Source::path_b, Language::it);
    if (pair.self_contained()) continue;
    if (!seen.insert(text::casefold_collapse(pair.clue)).second) continue;
    out.push_back(std::move(pair));
  }
  return out;
}

enum class JudgeKind { zero_shot_guideline, external_model };

/// Identifies a gateway-backed judge. `zero_shot_guideline` prompts a general
/// model with the acceptability criteria; `external_model` sends the same
/// request to a dedicated classifier model id.
struct JudgeBackend {
  std::string judge_id = "zero_shot_guideline";
  JudgeKind kind = JudgeKind::zero_shot_guideline;
  llm::ModelParams params = llm::default_params("pathb_judge");
};

/// Anything that can label a pair. Gateway judges and test doubles alike.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual const std::string& id() const = 0;
  virtual QualityVerdict assess(const ClueAnswerPair& pair) = 0;
};

/// Reads the first accept/reject token (ACCEPT/REJECT, ACCEPTABLE/UNACCEPTABLE,
/// YES/NO; "not acceptable" rejects). The next non-empty line is the rationale.
inline QualityVerdict parse_verdict(std::string_view response, const std::string& judge_id) {
  const auto lines = text::split_lines(response);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string word;
    std::string previous;
    std::optional<bool> decision;
    auto flush = [&] {
      if (!decision && !word.empty()) {
        if (word == "ACCEPT" || word == "ACCEPTED" || word == "ACCEPTABLE" || word == "YES") {
          decision = previous != "NOT";
        } else if (word == "REJECT" || word == "REJECTED" || word == "UNACCEPTABLE" || word == "NO") {
          decision = false;
        }
      }
      if (!word.empty()) previous = word;
      word.clear();
    };
    for (char c : lines[i]) {
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
        word.push_back(static_cast<char>(c >= 'a' ? c - 'a' + 'A' : c));
      } else {
        flush();
      }
    }
    flush();
    if (!decision) continue;
    QualityVerdict v{*decision, std::nullopt, judge_id};
    for (std::size_t k = i + 1; k < lines.size(); ++k) {
      const auto t = text::trim(lines[k]);
      if (!t.empty()) {
        v.rationale = std::string(t);
        break;
      }
    }
    return v;
  }
  fail(Errc::ParseFailure, "judge response has no accept/reject token", std::string(response));
}

class GatewayJudge : public Judge {
 public:
  GatewayJudge(llm::Gateway& gateway, JudgeBackend backend) : gateway_(gateway), backend_(std::move(backend)) {}

  const std::string& id() const override { return backend_.judge_id; }

  QualityVerdict assess(const ClueAnswerPair& pair) override {
    auto ex = gateway_.complete(
        {"pathb_judge", {{"answer", pair.answer_display}, {"clue", pair.clue}}, backend_.params});
    return parse_verdict(ex.response_text, backend_.judge_id);
  }

 private:
  llm::Gateway& gateway_;
  JudgeBackend backend_;
};

/// Empty and self-containing clues are rejected without asking the backend.
inline QualityVerdict judge_pair(const ClueAnswerPair& pair, Judge& judge) {
  if (text::trim(pair.clue).empty()) return {false, std::string("empty clue"), judge.id()};
  if (pair.self_contained()) return {false, std::string("clue contains the answer"), judge.id()};
  return judge.assess(pair);
}

/// Scores a judge against labelled pairs. `parallel` > 1 fans the calls out;
/// results are keyed by position so completion order does not matter.
inline EvalMetrics evaluate_judge(Judge& judge, const std::vector<ClueAnswerPair>& labeled,
                                  std::size_t parallel = 1) {
  std::vector<bool> labels;
  labels.reserve(labeled.size());
  for (const auto& p : labeled) {
    if (!p.label || *p.label == Label::unlabeled) {
      fail(Errc::InvalidArgument, "pair '" + p.answer_display + "' carries no label");
    }
    labels.push_back(*p.label == Label::acceptable);
  }
  std::vector<bool> predictions(labeled.size());
  if (parallel <= 1) {
    for (std::size_t i = 0; i < labeled.size(); ++i) predictions[i] = judge_pair(labeled[i], judge).accepted;
  } else {
    for (std::size_t start = 0; start < labeled.size(); start += parallel) {
      const auto end = std::min(labeled.size(), start + parallel);
      std::vector<std::future<bool>> futures;
      for (std::size_t i = start; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] { return judge_pair(labeled[i], judge).accepted; }));
      }
      for (std::size_t i = start; i < end; ++i) predictions[i] = futures[i - start].get();
    }
  }
  return compute_metrics(predictions, labels);
}

}  // namespace crux::pipeline
