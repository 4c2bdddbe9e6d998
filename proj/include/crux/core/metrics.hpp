#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"

namespace crux {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Binary classification metrics with "acceptable" as the positive class.
/// Ratios whose denominator is zero are reported as 0.
struct EvalMetrics {
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
  ConfusionCounts counts;

  friend bool operator==(const EvalMetrics&, const EvalMetrics&) = default;
};

inline EvalMetrics metrics_from_counts(const ConfusionCounts& c) {
  if (c.total() == 0) fail(Errc::EmptyInput, "no predictions to score");
  auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  EvalMetrics m;
  m.counts = c;
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  const double pr = m.precision + m.recall;
  m.f1 = pr > 0 ? 2 * m.precision * m.recall / pr : 0.0;
  return m;
}

inline EvalMetrics compute_metrics(const std::vector<bool>& predictions,
                                   const std::vector<bool>& labels) {
  if (predictions.size() != labels.size()) {
    fail(Errc::LengthMismatch, "predictions and labels differ in length");
  }
  if (predictions.empty()) fail(Errc::EmptyInput, "no predictions to score");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i]) {
      labels[i] ? ++c.tp : ++c.fp;
    } else {
      labels[i] ? ++c.fn : ++c.tn;
    }
  }
  return metrics_from_counts(c);
}

inline void to_json(nlohmann::json& j, const EvalMetrics& m) {
  j = nlohmann::json{{"accuracy", m.accuracy},
                     {"precision", m.precision},
                     {"recall", m.recall},
                     {"f1", m.f1},
                     {"counts",
                      {{"tp", m.counts.tp}, {"fp", m.counts.fp}, {"tn", m.counts.tn}, {"fn", m.counts.fn}}}};
}

}  // namespace crux
