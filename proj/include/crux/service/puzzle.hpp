#pragma once

// Numbered puzzles: what a generated grid becomes once clues are attached.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/types.hpp"
#include "crux/schema/grid.hpp"
#include "crux/schema/score.hpp"

namespace crux::service {

struct PuzzleCell {
  int row = 0;
  int col = 0;
  char letter = 'A';
  std::optional<int> number;

  friend bool operator==(const PuzzleCell&, const PuzzleCell&) = default;
};

struct PuzzleEntry {
  int number = 0;
  schema::Direction direction = schema::Direction::across;
  int row = 0;
  int col = 0;
  std::string answer;
  std::string clue;

  friend bool operator==(const PuzzleEntry&, const PuzzleEntry&) = default;
};

struct PuzzleScore {
  int fw = 0;
  int ll = 0;
  double fr = 0;
  double lr = 0;
  double score = 0;

  friend bool operator==(const PuzzleScore&, const PuzzleScore&) = default;
};

/// Coordinates are relative to the filled region: the puzzle is the grid's
/// bounding box, so (0,0) is its top-left cell.
struct NumberedPuzzle {
  int width = 0;
  int height = 0;
  std::vector<PuzzleCell> cells;
  std::vector<PuzzleEntry> entries;
  PuzzleScore score;

  friend bool operator==(const NumberedPuzzle&, const NumberedPuzzle&) = default;
};

/// Numbers cells in row-major order: a cell gets the next number when an
/// across or a down answer starts there. Clues are looked up by grid-form
/// answer; the first matching pair wins.
inline NumberedPuzzle assign_numbering(const schema::Grid& grid, const std::vector<ClueAnswerPair>& pairs,
                                       std::optional<schema::ScoreBreakdown> breakdown = std::nullopt) {
  if (grid.empty()) fail(Errc::InvalidArgument, "a puzzle needs at least one placed answer");
  std::map<std::string, const ClueAnswerPair*> by_answer;
  for (const auto& p : pairs) by_answer.emplace(p.answer_grid, &p);
  for (const auto& pl : grid.placements()) {
    if (!by_answer.count(pl.answer)) fail(Errc::MissingClue, "no clue for " + pl.answer, pl.answer);
  }

  const auto box = grid.bounding_box();
  NumberedPuzzle out;
  out.width = box.width();
  out.height = box.height();

  std::map<std::pair<int, int>, std::vector<const schema::Placement*>> starts;
  for (const auto& pl : grid.placements()) starts[{pl.row, pl.col}].push_back(&pl);

  int next = 1;
  for (int r = box.top; r <= box.bottom; ++r) {
    for (int c = box.left; c <= box.right; ++c) {
      const char letter = grid.at(r, c);
      if (!letter) continue;
      PuzzleCell cell{r - box.top, c - box.left, letter, std::nullopt};
      if (const auto it = starts.find({r, c}); it != starts.end()) {
        cell.number = next++;
        auto here = it->second;
        std::sort(here.begin(), here.end(), [](auto* a, auto* b) { return a->direction < b->direction; });
        for (const auto* pl : here) {
          out.entries.push_back({*cell.number, pl->direction, cell.row, cell.col, pl->answer,
                                 by_answer.at(pl->answer)->clue});
        }
      }
      out.cells.push_back(cell);
    }
  }

  const auto s = breakdown ? *breakdown : schema::score(grid);
  out.score = {s.fw, s.ll, s.fr, s.lr, s.score};
  return out;
}

inline nlohmann::ordered_json puzzle_json(const NumberedPuzzle& p) {
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& c : p.cells) {
    nlohmann::ordered_json j{{"row", c.row}, {"col", c.col}, {"letter", std::string(1, c.letter)}};
    if (c.number) j["number"] = *c.number;
    cells.push_back(std::move(j));
  }
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : p.entries) {
    entries.push_back({{"number", e.number},
                       {"direction", to_string(e.direction)},
                       {"row", e.row},
                       {"col", e.col},
                       {"answer", e.answer},
                       {"clue", e.clue}});
  }
  return {{"width", p.width},
          {"height", p.height},
          {"cells", std::move(cells)},
          {"entries", std::move(entries)},
          {"score",
           {{"fw", p.score.fw}, {"ll", p.score.ll}, {"fr", p.score.fr}, {"lr", p.score.lr}, {"score", p.score.score}}}};
}

inline NumberedPuzzle puzzle_from_json(const nlohmann::json& j) {
  NumberedPuzzle p;
  try {
    p.width = j.at("width").get<int>();
    p.height = j.at("height").get<int>();
    for (const auto& c : j.at("cells")) {
      const auto letter = c.at("letter").get<std::string>();
      if (letter.size() != 1) fail(Errc::InvalidArgument, "cell letter must be one character");
      PuzzleCell cell{c.at("row").get<int>(), c.at("col").get<int>(), letter[0], std::nullopt};
      if (c.contains("number")) cell.number = c.at("number").get<int>();
      p.cells.push_back(cell);
    }
    for (const auto& e : j.at("entries")) {
      const auto dir = e.at("direction").get<std::string>();
      if (dir != "across" && dir != "down") fail(Errc::InvalidArgument, "bad direction " + dir);
      p.entries.push_back({e.at("number").get<int>(),
                           dir == "across" ? schema::Direction::across : schema::Direction::down,
                           e.at("row").get<int>(), e.at("col").get<int>(), e.at("answer").get<std::string>(),
                           e.at("clue").get<std::string>()});
    }
    const auto& s = j.at("score");
    p.score = {s.at("fw").get<int>(), s.at("ll").get<int>(), s.at("fr").get<double>(), s.at("lr").get<double>(),
               s.at("score").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidArgument, std::string("malformed puzzle: ") + e.what());
  }
  if (p.entries.empty()) fail(Errc::InvalidArgument, "a puzzle needs at least one entry");
  return p;
}

enum class ExportFormat { json, text };

inline std::string render_text(const NumberedPuzzle& p) {
  std::vector<std::string> rows(p.height, std::string(p.width, '.'));
  for (const auto& c : p.cells) rows[c.row][c.col] = c.letter;
  std::string out;
  for (const auto& r : rows) out += r + "\n";
  for (auto d : {schema::Direction::across, schema::Direction::down}) {
    out += d == schema::Direction::across ? "\nAcross\n" : "\nDown\n";
    for (const auto& e : p.entries) {
      if (e.direction != d) continue;
      out += std::to_string(e.number) + ". " + e.clue + " (" + std::to_string(e.answer.size()) + ")\n";
    }
  }
  return out;
}

inline std::string export_puzzle(const NumberedPuzzle& p, ExportFormat format) {
  if (format == ExportFormat::text) return render_text(p);
  return puzzle_json(p).dump(2) + "\n";
}

}  // namespace crux::service
