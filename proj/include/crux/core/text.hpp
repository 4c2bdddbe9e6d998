#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crux/core/error.hpp"

namespace crux::text {

/// Decodes UTF-8 into code points. Returns nullopt on malformed input
/// (overlong forms, surrogates and truncated sequences included).
inline std::optional<std::u32string> decode_utf8(std::string_view in) {
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      return std::nullopt;
    }
    if (i + len > in.size()) return std::nullopt;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(in[i + k]);
      if ((b & 0xC0) != 0x80) return std::nullopt;
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

constexpr bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0xA0;
}

/// Maps a Latin letter, accented or not, onto its uppercase A-Z base letter.
constexpr std::optional<char> fold_letter(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return static_cast<char>(cp - U'a' + 'A');
  if (cp >= U'A' && cp <= U'Z') return static_cast<char>(cp);
  switch (cp) {
    case 0xC0: case 0xC1: case 0xC2: case 0xC3: case 0xC4: case 0xC5:
    case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5:
      return 'A';
    case 0xC7: case 0xE7:
      return 'C';
    case 0xC8: case 0xC9: case 0xCA: case 0xCB:
    case 0xE8: case 0xE9: case 0xEA: case 0xEB:
      return 'E';
    case 0xCC: case 0xCD: case 0xCE: case 0xCF:
    case 0xEC: case 0xED: case 0xEE: case 0xEF:
      return 'I';
    case 0xD1: case 0xF1:
      return 'N';
    case 0xD2: case 0xD3: case 0xD4: case 0xD5: case 0xD6: case 0xD8:
    case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: case 0xF8:
      return 'O';
    case 0xD9: case 0xDA: case 0xDB: case 0xDC:
    case 0xF9: case 0xFA: case 0xFB: case 0xFC:
      return 'U';
    case 0xDD: case 0xFD: case 0xFF:
      return 'Y';
    default:
      return std::nullopt;
  }
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Grid-form of an answer: uppercase A-Z only. Spaces, hyphens and
/// apostrophes vanish, accents fold to the base letter, anything else is an
/// error. Idempotent.
inline std::string normalize_answer(std::string_view raw) {
  const auto trimmed = trim(raw);
  if (trimmed.empty()) fail(Errc::EmptyAnswer, "answer is empty");
  const auto cps = decode_utf8(trimmed);
  if (!cps) fail(Errc::UnmappableCharacter, "answer is not valid UTF-8", std::string(raw));
  std::string out;
  out.reserve(cps->size());
  for (char32_t cp : *cps) {
    if (is_space(cp) || cp == U'-' || cp == U'\'' || cp == 0x2019 || cp == 0x2018) continue;
    if (const auto letter = fold_letter(cp)) {
      out.push_back(*letter);
      continue;
    }
    std::string bad;
    append_utf8(bad, cp);
    fail(Errc::UnmappableCharacter, "cannot map '" + bad + "' onto A-Z", std::string(raw));
  }
  if (out.empty()) fail(Errc::EmptyAnswer, "nothing left after normalization", std::string(raw));
  return out;
}

/// Uppercase A-Z letters of `s` with accents folded; every other character
/// is dropped. Used for containment and keyword matching, never throws.
inline std::string fold_letters(std::string_view s) {
  std::string out;
  if (const auto cps = decode_utf8(s)) {
    for (char32_t cp : *cps) {
      if (const auto letter = fold_letter(cp)) out.push_back(*letter);
    }
  } else {
    for (char c : s) {
      if (const auto letter = fold_letter(static_cast<unsigned char>(c))) out.push_back(*letter);
    }
  }
  return out;
}

/// True when the clue spells out the answer, ignoring case, accents,
/// spacing and punctuation.
inline bool clue_contains_answer(std::string_view clue, std::string_view answer_grid) {
  if (answer_grid.empty()) return false;
  return fold_letters(clue).find(answer_grid) != std::string::npos;
}

/// Lowercases ASCII and Latin-1 letters, trims, and collapses every
/// whitespace run to one space.
inline std::string casefold_collapse(std::string_view s) {
  std::string out;
  const auto cps = decode_utf8(s);
  bool pending_space = false;
  auto emit = [&](char32_t cp) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      return;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    if (cp >= U'A' && cp <= U'Z') cp += 32;
    else if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) cp += 32;
    append_utf8(out, cp);
  };
  if (cps) {
    for (char32_t cp : *cps) emit(cp);
  } else {
    for (char c : s) emit(static_cast<unsigned char>(c));
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> split_lines(std::string_view s) {
  auto lines = split(s, '\n');
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return lines;
}

inline std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!ws && !in_word) ++n;
    in_word = !ws;
  }
  return n;
}

}  // namespace crux::text
