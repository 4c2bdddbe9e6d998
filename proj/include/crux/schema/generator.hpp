#pragma once

// Randomised schema construction. One attempt drops a first answer near the
// middle of the work area and keeps adding crossing answers until none fits.
// A stuck attempt is scored as a candidate; then either a few recent words
// are removed and filling resumes, or the grid is rebuilt from scratch. The
// highest-scoring candidate across all attempts wins.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/rng.hpp"
#include "crux/core/types.hpp"
#include "crux/schema/grid.hpp"
#include "crux/schema/score.hpp"

namespace crux::schema {

struct GenerationConfig {
  int width = 15;
  int height = 15;
  /// Success needs at least this many words...
  int min_words = 8;
  /// ...and at least this fill ratio.
  double min_fill_ratio = 0.35;
  /// Rebuilds from scratch allowed after the first attempt.
  int max_restarts = 50;
  std::chrono::milliseconds max_duration{10'000};
  /// Sampling weight of a preferred answer; others weigh 1.
  double preferred_weight = 3.0;
  /// Chance that a stuck attempt backtracks instead of restarting.
  double removal_probability = 0.3;
  std::uint64_t seed = 42;
  FrDenominator fr_denominator = FrDenominator::bbox;

  void validate() const {
    if (width < 1 || height < 1) fail(Errc::InvalidArgument, "work area must be at least 1x1");
    if (min_words < 1) fail(Errc::InvalidArgument, "min_words must be positive");
    if (!(min_fill_ratio >= 0.0 && min_fill_ratio <= 1.0)) fail(Errc::InvalidArgument, "min_fill_ratio must lie in [0,1]");
    if (max_restarts < 0) fail(Errc::InvalidArgument, "max_restarts must not be negative");
    if (max_duration.count() <= 0) fail(Errc::InvalidArgument, "max_duration must be positive");
    if (!(preferred_weight >= 1.0)) fail(Errc::InvalidArgument, "preferred_weight must be at least 1");
    if (!(removal_probability >= 0.0 && removal_probability <= 1.0)) {
      fail(Errc::InvalidArgument, "removal_probability must lie in [0,1]");
    }
  }
};

enum class StopDecision { continue_search, stop_success, stop_budget };

constexpr std::string_view to_string(StopDecision d) {
  switch (d) {
    case StopDecision::continue_search: return "continue";
    case StopDecision::stop_success: return "stop_success";
    case StopDecision::stop_budget: return "stop_budget";
  }
  return "continue";
}

struct SearchState {
  int fw = 0;
  double fr = 0;
  int restarts = 0;
};

/// Success beats budget when both hold. The restart budget is exceeded only
/// when restarts > max_restarts.
inline StopDecision check_stop(const SearchState& state, const GenerationConfig& config,
                               std::chrono::nanoseconds elapsed) {
  if (state.fw >= config.min_words && state.fr >= config.min_fill_ratio) return StopDecision::stop_success;
  if (state.restarts > config.max_restarts || elapsed >= config.max_duration) return StopDecision::stop_budget;
  return StopDecision::continue_search;
}

enum class CandidateEnd { stuck, success, budget };

constexpr std::string_view to_string(CandidateEnd e) {
  switch (e) {
    case CandidateEnd::stuck: return "stuck";
    case CandidateEnd::success: return "success";
    case CandidateEnd::budget: return "budget";
  }
  return "stuck";
}

struct TraceEntry {
  int attempt = 0;
  int step = 0;
  CandidateEnd end = CandidateEnd::stuck;
  ScoreBreakdown score;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct GenerationResult {
  Grid grid;
  ScoreBreakdown score;
  std::vector<TraceEntry> trace;
  /// Distinct answers the search was given, in pool order.
  std::vector<std::string> inputs;
  /// Pool answers that cannot fit the work area at all.
  std::vector<std::string> skipped;
  int restarts = 0;
  StopDecision stop = StopDecision::stop_budget;
  std::chrono::nanoseconds elapsed{0};
};

inline void to_json(nlohmann::json& j, const TraceEntry& t) {
  j = nlohmann::json{{"attempt", t.attempt}, {"step", t.step}, {"end", to_string(t.end)}, {"score", t.score}};
}

namespace detail {

using Clock = std::chrono::steady_clock;

struct Search {
  const GenerationConfig& cfg;
  const std::vector<std::string>& answers;
  std::vector<double> weights;
  Rng rng;
  Clock::time_point start = Clock::now();

  Grid grid;
  std::vector<bool> used;
  std::vector<std::size_t> order;  // answer index for each placement on the grid
  int restarts = 0;
  int attempt = 0;
  int step = 0;

  std::vector<TraceEntry> trace;
  std::optional<Grid> best;
  ScoreBreakdown best_score;

  Search(const GenerationConfig& c, const std::vector<std::string>& a, std::vector<double> w)
      : cfg(c), answers(a), weights(std::move(w)), rng(c.seed), grid(c.width, c.height), used(a.size(), false) {}

  std::chrono::nanoseconds elapsed() const { return Clock::now() - start; }

  void record(CandidateEnd end) {
    const auto s = score(grid, cfg.fr_denominator);
    trace.push_back({attempt, step, end, s});
    if (s.fw >= 2 && (!best || s.score > best_score.score)) {
      best = grid;
      best_score = s;
    }
  }

  void put(std::size_t answer, const Placement& p) {
    grid.apply(p);
    used[answer] = true;
    order.push_back(answer);
  }

  void take_back(std::size_t k) {
    grid.undo(k);
    for (std::size_t i = 0; i < k; ++i) {
      used[order.back()] = false;
      order.pop_back();
    }
  }

  // First word: its middle letter as close to the centre as the area allows.
  void seed_attempt() {
    grid = Grid(cfg.width, cfg.height);
    std::fill(used.begin(), used.end(), false);
    order.clear();
    const auto first = rng.weighted(weights);
    const auto& answer = answers[first];
    const int len = static_cast<int>(answer.size());
    const bool fits_across = len <= cfg.width;
    const bool fits_down = len <= cfg.height;
    const bool coin = rng.chance(0.5);
    const Direction dir = fits_across && (coin || !fits_down) ? Direction::across : Direction::down;

    std::vector<Placement> closest;
    long best_dist = -1;
    const int mid = (len - 1) / 2;
    for (const auto& cand : legal_placements(grid, answer)) {
      if (cand.placement.direction != dir) continue;
      // Doubled coordinates keep the half-cell centre of even sides integral.
      const long dr = 2L * cand.placement.row_at(mid) - (cfg.height - 1);
      const long dc = 2L * cand.placement.col_at(mid) - (cfg.width - 1);
      const long dist = dr * dr + dc * dc;
      if (best_dist < 0 || dist < best_dist) {
        best_dist = dist;
        closest.clear();
      }
      if (dist == best_dist) closest.push_back(cand.placement);
    }
    put(first, closest[rng.below(closest.size())]);
  }

  // One growth step. False when no unused answer fits anywhere.
  bool grow() {
    std::vector<std::size_t> options;
    std::vector<double> option_weights;
    std::vector<std::vector<Placement>> option_best;
    for (std::size_t i = 0; i < answers.size(); ++i) {
      if (used[i]) continue;
      int top = -1;
      std::vector<Placement> best_here;
      for (auto& cand : legal_placements(grid, answers[i])) {
        if (cand.crossings > top) {
          top = cand.crossings;
          best_here.clear();
        }
        if (cand.crossings == top) best_here.push_back(std::move(cand.placement));
      }
      if (best_here.empty()) continue;
      options.push_back(i);
      option_weights.push_back(weights[i]);
      option_best.push_back(std::move(best_here));
    }
    if (options.empty()) return false;
    const auto pick = rng.weighted(option_weights);
    const auto& spots = option_best[pick];
    put(options[pick], spots[rng.below(spots.size())]);
    return true;
  }

  StopDecision run() {
    seed_attempt();
    while (true) {
      ++step;
      const auto current = score(grid, cfg.fr_denominator);
      const auto decision = check_stop({current.fw, current.fr, restarts}, cfg, elapsed());
      if (decision == StopDecision::stop_success) {
        record(CandidateEnd::success);
        return decision;
      }
      if (decision == StopDecision::stop_budget) {
        record(CandidateEnd::budget);
        return decision;
      }
      if (grow()) continue;

      record(CandidateEnd::stuck);
      const int placed = static_cast<int>(grid.placements().size());
      if (placed >= 2 && rng.chance(cfg.removal_probability)) {
        const int most = std::min(3, placed - 1);
        take_back(1 + rng.below(most));
        continue;
      }
      const int next = restarts + 1;
      if (check_stop({0, 0.0, next}, cfg, elapsed()) == StopDecision::stop_budget) return StopDecision::stop_budget;
      restarts = next;
      ++attempt;
      seed_attempt();
    }
  }
};

}  // namespace detail

/// Builds a schema from answers in grid form. Deterministic for a fixed seed
/// as long as the wall-clock budget is not what ends the search.
inline GenerationResult generate_answers(const std::vector<std::string>& pool, const std::set<std::string>& preferred,
                                         const GenerationConfig& config) {
  config.validate();
  GenerationResult result{Grid(config.width, config.height), {}, {}, {}, {}, 0, StopDecision::stop_budget, {}};
  std::set<std::string> seen;
  std::vector<std::string> answers;
  const int longest = std::max(config.width, config.height);
  for (const auto& a : pool) {
    if (!seen.insert(a).second) continue;
    result.inputs.push_back(a);
    if (a.size() < 2 || static_cast<int>(a.size()) > longest) {
      result.skipped.push_back(a);
      continue;
    }
    for (char c : a) {
      if (c < 'A' || c > 'Z') fail(Errc::InvalidArgument, a + " is not in grid form");
    }
    answers.push_back(a);
  }
  if (answers.size() < 2) fail(Errc::PoolTooSmall, "need at least 2 usable answers, have " + std::to_string(answers.size()));

  std::vector<double> weights;
  for (const auto& a : answers) weights.push_back(preferred.count(a) ? config.preferred_weight : 1.0);

  detail::Search search(config, answers, std::move(weights));
  result.stop = search.run();
  result.elapsed = search.elapsed();
  result.restarts = search.restarts;
  result.trace = std::move(search.trace);
  if (!search.best) {
    fail(Errc::NoSolution, "no schema with two or more crossing words was found within budget");
  }
  result.grid = std::move(*search.best);
  result.score = search.best_score;
  return result;
}

/// Pair-level entry point: answers come from `answer_grid`, preferred
/// answers may be given in display or grid form.
inline GenerationResult generate(const std::vector<ClueAnswerPair>& pool, const std::set<std::string>& preferred,
                                 const GenerationConfig& config) {
  std::vector<std::string> answers;
  answers.reserve(pool.size());
  for (const auto& p : pool) answers.push_back(p.answer_grid);
  std::set<std::string> preferred_grid;
  for (const auto& p : preferred) {
    try {
      preferred_grid.insert(text::normalize_answer(p));
    } catch (const Error&) {
    }
  }
  return generate_answers(answers, preferred_grid, config);
}

}  // namespace crux::schema
