#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crux/core/error.hpp"

namespace crux::schema {

enum class Direction { across, down };

constexpr std::string_view to_string(Direction d) { return d == Direction::across ? "across" : "down"; }

struct Placement {
  std::string answer;
  int row = 0;
  int col = 0;
  Direction direction = Direction::across;

  int length() const { return static_cast<int>(answer.size()); }
  int row_at(int i) const { return direction == Direction::down ? row + i : row; }
  int col_at(int i) const { return direction == Direction::across ? col + i : col; }

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct BoundingBox {
  int top = 0, left = 0, bottom = -1, right = -1;  // inclusive; empty when bottom < top

  bool empty() const { return bottom < top; }
  int height() const { return empty() ? 0 : bottom - top + 1; }
  int width() const { return empty() ? 0 : right - left + 1; }
  long area() const { return static_cast<long>(height()) * width(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Letters on a width x height work area together with the placements that
/// put them there. Each cell remembers how many across and down words cover
/// it, so filled-cell and crossing counts are kept up to date on every
/// apply/undo instead of being rescanned.
class Grid {
 public:
  Grid(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) fail(Errc::InvalidArgument, "work area must be at least 1x1");
    cells_.resize(static_cast<std::size_t>(width) * height);
    row_fill_.assign(height, 0);
    col_fill_.assign(width, 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(int r, int c) const { return r >= 0 && c >= 0 && r < height_ && c < width_; }

  /// Letter at (r, c), or '\0' for an empty or out-of-area cell.
  char at(int r, int c) const { return in_bounds(r, c) ? cell(r, c).letter : '\0'; }
  bool filled(int r, int c) const { return at(r, c) != '\0'; }

  int coverage(int r, int c, Direction d) const {
    if (!in_bounds(r, c)) return 0;
    const auto& x = cell(r, c);
    return d == Direction::across ? x.across : x.down;
  }
  int coverage(int r, int c) const { return coverage(r, c, Direction::across) + coverage(r, c, Direction::down); }

  const std::vector<Placement>& placements() const { return placements_; }
  bool empty() const { return placements_.empty(); }

  /// Distinct filled cells.
  int letter_count() const { return filled_; }
  /// Cells covered by two placements.
  int linked_count() const { return linked_; }

  BoundingBox bounding_box() const {
    BoundingBox b;
    if (filled_ == 0) return b;
    auto first = [](const std::vector<int>& v) {
      return static_cast<int>(std::find_if(v.begin(), v.end(), [](int n) { return n > 0; }) - v.begin());
    };
    auto last = [](const std::vector<int>& v) {
      return static_cast<int>(v.rend() - std::find_if(v.rbegin(), v.rend(), [](int n) { return n > 0; })) - 1;
    };
    b.top = first(row_fill_);
    b.bottom = last(row_fill_);
    b.left = first(col_fill_);
    b.right = last(col_fill_);
    return b;
  }

  /// Sparse view of the filled cells, row-major.
  std::map<std::pair<int, int>, char> cells() const {
    std::map<std::pair<int, int>, char> out;
    for (int r = 0; r < height_; ++r) {
      for (int c = 0; c < width_; ++c) {
        if (const char l = cell(r, c).letter) out.emplace(std::pair{r, c}, l);
      }
    }
    return out;
  }

  /// Writes a placement onto the grid. Checks the area bounds, letter
  /// agreement and that no same-direction word already covers a cell; the
  /// adjacency and crossing rules are the caller's business (see place()).
  void apply(const Placement& p) {
    if (p.answer.empty()) fail(Errc::IllegalPlacement, "empty answer");
    for (int i = 0; i < p.length(); ++i) {
      const int r = p.row_at(i), c = p.col_at(i);
      if (!in_bounds(r, c)) fail(Errc::IllegalPlacement, p.answer + " leaves the work area");
      const auto& x = cell(r, c);
      if (x.letter && x.letter != p.answer[i]) fail(Errc::IllegalPlacement, p.answer + " disagrees with a crossing letter");
      if ((p.direction == Direction::across ? x.across : x.down) > 0) {
        fail(Errc::IllegalPlacement, p.answer + " overlaps a word running the same way");
      }
    }
    for (int i = 0; i < p.length(); ++i) {
      const int r = p.row_at(i), c = p.col_at(i);
      auto& x = cell(r, c);
      const int before = x.across + x.down;
      (p.direction == Direction::across ? x.across : x.down) += 1;
      if (before == 0) {
        x.letter = p.answer[i];
        ++filled_;
        ++row_fill_[r];
        ++col_fill_[c];
      } else if (before == 1) {
        ++linked_;
      }
    }
    placements_.push_back(p);
  }

  /// Undoes the last k placements.
  void undo(std::size_t k) {
    if (k > placements_.size()) fail(Errc::TooMany, "cannot remove more placements than exist");
    for (std::size_t n = 0; n < k; ++n) {
      const auto p = std::move(placements_.back());
      placements_.pop_back();
      for (int i = 0; i < p.length(); ++i) {
        const int r = p.row_at(i), c = p.col_at(i);
        auto& x = cell(r, c);
        (p.direction == Direction::across ? x.across : x.down) -= 1;
        const int after = x.across + x.down;
        if (after == 0) {
          x.letter = '\0';
          --filled_;
          --row_fill_[r];
          --col_fill_[c];
        } else if (after == 1) {
          --linked_;
        }
      }
    }
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  struct Cell {
    char letter = '\0';
    std::uint8_t across = 0;
    std::uint8_t down = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  const Cell& cell(int r, int c) const { return cells_[static_cast<std::size_t>(r) * width_ + c]; }
  Cell& cell(int r, int c) { return cells_[static_cast<std::size_t>(r) * width_ + c]; }

  int width_;
  int height_;
  std::vector<Cell> cells_;
  std::vector<int> row_fill_;
  std::vector<int> col_fill_;
  int filled_ = 0;
  int linked_ = 0;
  std::vector<Placement> placements_;
};

inline void check_answer(const Grid& grid, std::string_view answer) {
  if (answer.size() < 2) fail(Errc::AnswerTooShort, "answers need at least 2 letters");
  if (static_cast<int>(answer.size()) > std::max(grid.width(), grid.height())) {
    fail(Errc::AnswerTooLong, std::string(answer) + " does not fit the work area");
  }
  for (char c : answer) {
    if (c < 'A' || c > 'Z') fail(Errc::InvalidArgument, std::string(answer) + " is not in grid form");
  }
}

/// Crossing count if `p` may be placed on `grid`, nullopt otherwise.
///
/// Legal means: inside the area; every occupied cell it passes through has
/// the same letter and is not already covered in p's direction; the cells
/// just before and after the word are empty; each newly filled cell has no
/// filled neighbour across the word's direction (so no run of two or more
/// letters appears that is not a placed word); and, unless the grid is
/// empty, at least one crossing.
inline std::optional<int> crossings_if_legal(const Grid& grid, const Placement& p) {
  const int len = p.length();
  const int dr = p.direction == Direction::down ? 1 : 0;
  const int dc = p.direction == Direction::across ? 1 : 0;
  if (!grid.in_bounds(p.row, p.col) || !grid.in_bounds(p.row_at(len - 1), p.col_at(len - 1))) return std::nullopt;
  if (grid.filled(p.row - dr, p.col - dc)) return std::nullopt;
  if (grid.filled(p.row_at(len - 1) + dr, p.col_at(len - 1) + dc)) return std::nullopt;
  int crossings = 0;
  for (int i = 0; i < len; ++i) {
    const int r = p.row_at(i), c = p.col_at(i);
    const char existing = grid.at(r, c);
    if (existing) {
      if (existing != p.answer[i] || grid.coverage(r, c, p.direction) > 0) return std::nullopt;
      ++crossings;
    } else if (grid.filled(r - dc, c - dr) || grid.filled(r + dc, c + dr)) {
      return std::nullopt;
    }
  }
  if (!grid.empty() && crossings == 0) return std::nullopt;
  return crossings;
}

struct Candidate {
  Placement placement;
  int crossings = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Every legal placement of `answer`, across before down, then row-major.
inline std::vector<Candidate> legal_placements(const Grid& grid, const std::string& answer) {
  check_answer(grid, answer);
  std::vector<Candidate> out;
  for (auto d : {Direction::across, Direction::down}) {
    for (int r = 0; r < grid.height(); ++r) {
      for (int c = 0; c < grid.width(); ++c) {
        Placement p{answer, r, c, d};
        if (const auto x = crossings_if_legal(grid, p)) out.push_back({std::move(p), *x});
      }
    }
  }
  return out;
}

/// New grid with `p` added; throws IllegalPlacement unless p is legal.
inline Grid place(const Grid& grid, const Placement& p) {
  check_answer(grid, p.answer);
  if (!crossings_if_legal(grid, p)) {
    fail(Errc::IllegalPlacement, p.answer + " cannot go at (" + std::to_string(p.row) + "," +
                                     std::to_string(p.col) + ") " + std::string(to_string(p.direction)));
  }
  Grid out = grid;
  out.apply(p);
  return out;
}

/// New grid without its last k placements.
inline Grid remove_last(const Grid& grid, std::size_t k) {
  Grid out = grid;
  out.undo(k);
  return out;
}

}  // namespace crux::schema
