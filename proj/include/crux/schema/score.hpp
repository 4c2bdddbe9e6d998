#pragma once

#include <nlohmann/json.hpp>

#include "crux/schema/grid.hpp"

namespace crux::schema {

/// Which rectangle the fill ratio divides by.
enum class FrDenominator { bbox, work_area };

/// Score = (FW + 0.5 * LL) * FR * LR, where
///   FW  placed words,
///   LL  cells shared by two crossing words,
///   FR  filled cells / area of the rectangle in use,
///   LR  LL / filled cells.
/// FR and LR are 0 on an empty grid, so a schema without crossings scores 0.
struct ScoreBreakdown {
  int fw = 0;
  int ll = 0;
  int letters = 0;
  long area = 0;
  double fr = 0;
  double lr = 0;
  double score = 0;

  friend bool operator==(const ScoreBreakdown&, const ScoreBreakdown&) = default;
};

/// Composes a breakdown from its integer parts. The only place the formula
/// lives, so every caller gets bit-identical doubles for the same counts.
inline ScoreBreakdown compose_score(int fw, int ll, int letters, long area) {
  ScoreBreakdown s{fw, ll, letters, area, 0, 0, 0};
  s.fr = letters > 0 && area > 0 ? static_cast<double>(letters) / static_cast<double>(area) : 0.0;
  s.lr = letters > 0 ? static_cast<double>(ll) / static_cast<double>(letters) : 0.0;
  s.score = (s.fw + 0.5 * s.ll) * s.fr * s.lr;
  return s;
}

inline ScoreBreakdown score(const Grid& grid, FrDenominator denominator = FrDenominator::bbox) {
  const long area = denominator == FrDenominator::bbox ? grid.bounding_box().area()
                                                       : static_cast<long>(grid.width()) * grid.height();
  return compose_score(static_cast<int>(grid.placements().size()), grid.linked_count(), grid.letter_count(), area);
}

inline void to_json(nlohmann::json& j, const ScoreBreakdown& s) {
  j = nlohmann::json{{"fw", s.fw}, {"ll", s.ll}, {"fr", s.fr}, {"lr", s.lr}, {"score", s.score}};
}

}  // namespace crux::schema
