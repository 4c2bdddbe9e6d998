#pragma once

// From-scratch checker for grids. Uses nothing but the cell letters and the
// placement list, never the grid's own counters, so it can be trusted to
// catch bookkeeping bugs in the incremental code.

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "crux/schema/grid.hpp"
#include "crux/schema/score.hpp"

namespace crux::schema {

struct Run {
  std::string letters;
  int row = 0;
  int col = 0;
  Direction direction = Direction::across;
};

struct OracleVerdict {
  bool valid = true;
  std::vector<std::string> problems;
  std::vector<Run> runs;
  int fw = 0;
  int ll = 0;
  int letters = 0;
  long area = 0;
  double score = 0;

  void flag(std::string what) {
    valid = false;
    problems.push_back(std::move(what));
  }
};

namespace detail {

inline std::string describe(const Run& r) {
  return r.letters + "@(" + std::to_string(r.row) + "," + std::to_string(r.col) + ")" +
         std::string(to_string(r.direction));
}

}  // namespace detail

/// Every maximal horizontal and vertical run of two or more letters.
inline std::vector<Run> letter_runs(const Grid& g) {
  std::vector<Run> runs;
  for (auto d : {Direction::across, Direction::down}) {
    const int outer = d == Direction::across ? g.height() : g.width();
    const int inner = d == Direction::across ? g.width() : g.height();
    for (int o = 0; o < outer; ++o) {
      int i = 0;
      while (i < inner) {
        auto at = [&](int k) { return d == Direction::across ? g.at(o, k) : g.at(k, o); };
        if (!at(i)) {
          ++i;
          continue;
        }
        const int begin = i;
        std::string s;
        while (i < inner && at(i)) s.push_back(at(i++));
        if (s.size() >= 2) {
          runs.push_back({s, d == Direction::across ? o : begin, d == Direction::across ? begin : o, d});
        }
      }
    }
  }
  return runs;
}

/// Checks a grid against the open-grid rules and recomputes its score.
///
/// Valid means: each run of two or more letters is exactly one placement and
/// its answer is in `pool` (an empty pool skips that check); each placement
/// is such a run; no answer is used twice; all filled cells form one
/// connected region; and score(grid) matches the recount field by field,
/// the score itself to 1e-12 relative.
inline OracleVerdict validity_oracle(const Grid& grid, const std::set<std::string>& pool,
                                     FrDenominator denominator = FrDenominator::bbox) {
  OracleVerdict v;
  v.runs = letter_runs(grid);

  std::map<std::tuple<int, int, Direction>, std::string> placed;
  std::multiset<std::string> answers;
  for (const auto& p : grid.placements()) {
    placed[{p.row, p.col, p.direction}] = p.answer;
    answers.insert(p.answer);
    for (int i = 0; i < p.length(); ++i) {
      if (grid.at(p.row_at(i), p.col_at(i)) != p.answer[i]) {
        v.flag("placement " + p.answer + " disagrees with the cells it covers");
        break;
      }
    }
  }
  for (auto it = answers.begin(); it != answers.end(); it = answers.upper_bound(*it)) {
    if (answers.count(*it) > 1) v.flag("answer " + *it + " placed more than once");
  }

  std::set<std::tuple<int, int, Direction>> matched;
  for (const auto& r : v.runs) {
    const auto it = placed.find({r.row, r.col, r.direction});
    if (it == placed.end() || it->second != r.letters) {
      v.flag("accidental run " + detail::describe(r));
      continue;
    }
    matched.insert(it->first);
    if (!pool.empty() && !pool.count(r.letters)) v.flag("run " + detail::describe(r) + " is not a pool answer");
  }
  for (const auto& [key, answer] : placed) {
    if (!matched.count(key)) v.flag("placement " + answer + " is not a maximal run");
  }

  // Letters, crossings and bounding box straight from the cells.
  int top = grid.height(), left = grid.width(), bottom = -1, right = -1;
  std::vector<std::pair<int, int>> filled;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (!grid.at(r, c)) continue;
      filled.emplace_back(r, c);
      top = std::min(top, r);
      bottom = std::max(bottom, r);
      left = std::min(left, c);
      right = std::max(right, c);
      const bool horizontal = grid.at(r, c - 1) || grid.at(r, c + 1);
      const bool vertical = grid.at(r - 1, c) || grid.at(r + 1, c);
      if (horizontal && vertical) ++v.ll;
    }
  }
  v.letters = static_cast<int>(filled.size());
  v.fw = static_cast<int>(v.runs.size());
  if (denominator == FrDenominator::bbox) {
    v.area = filled.empty() ? 0 : static_cast<long>(bottom - top + 1) * (right - left + 1);
  } else {
    v.area = static_cast<long>(grid.width()) * grid.height();
  }
  // (fw + ll/2) * (letters/area) * (ll/letters) collapses to this.
  v.score = filled.empty() || v.area == 0 ? 0.0 : (2.0 * v.fw + v.ll) * v.ll / (2.0 * static_cast<double>(v.area));

  if (!filled.empty()) {
    std::set<std::pair<int, int>> seen{filled.front()};
    std::queue<std::pair<int, int>> todo;
    todo.push(filled.front());
    while (!todo.empty()) {
      const auto [r, c] = todo.front();
      todo.pop();
      for (const auto& [nr, nc] : {std::pair{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}}) {
        if (grid.at(nr, nc) && seen.insert({nr, nc}).second) todo.push({nr, nc});
      }
    }
    if (seen.size() != filled.size()) v.flag("filled cells are not connected");
  }

  const auto s = score(grid, denominator);
  if (s.fw != v.fw) v.flag("fw " + std::to_string(s.fw) + " != recount " + std::to_string(v.fw));
  if (s.ll != v.ll) v.flag("ll " + std::to_string(s.ll) + " != recount " + std::to_string(v.ll));
  if (s.letters != v.letters) v.flag("letters " + std::to_string(s.letters) + " != recount " + std::to_string(v.letters));
  if (s.area != v.area) v.flag("area " + std::to_string(s.area) + " != recount " + std::to_string(v.area));
  if (std::abs(s.score - v.score) > 1e-12 * std::max(1.0, std::abs(v.score))) {
    v.flag("score " + std::to_string(s.score) + " != recount " + std::to_string(v.score));
  }
  return v;
}

}  // namespace crux::schema
