#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crux/core/error.hpp"
#include "crux/core/types.hpp"
#include "crux/llm/prompt_bodies.hpp"

namespace crux::llm {

using Bindings = std::map<std::string, std::string>;

struct PromptTemplate {
  std::string id;
  std::string body;
  Language language = Language::en;
  bool generative = false;
};

namespace detail {

inline std::string pathb_gen_body() {
  return R"(Generate {n} distinct short Italian crossword clues for the answer below. Follow the style of the examples. Write one clue per line, with no numbering, no quotation marks, and never the answer itself.

Examples:
{examples}

Answer: {keyword}
Clues:
)";
}

inline std::string pathb_judge_body() {
  return std::string(
             "You review Italian crossword clue-answer pairs. A pair is acceptable only if it satisfies "
             "these criteria:\n\n") +
         prompts::judge_guideline +
         "\n\nA clue that contains its own answer is never acceptable.\n\n"
         "Answer: {answer}\n"
         "Clue: {clue}\n\n"
         "Reply with ACCEPT or REJECT on the first line, then one line of rationale.\n";
}

}  // namespace detail

/// The eight registered templates, keyed by id.
inline const std::map<std::string, PromptTemplate, std::less<>>& registry() {
  static const std::map<std::string, PromptTemplate, std::less<>> templates = [] {
    std::map<std::string, PromptTemplate, std::less<>> m;
    auto add = [&](std::string id, std::string body, Language lang, bool generative) {
      m.emplace(id, PromptTemplate{id, std::move(body), lang, generative});
    };
    add("kw_it", prompts::kw_it, Language::it, false);
    add("kw_en", prompts::kw_en, Language::en, false);
    add("clue_it", prompts::clue_it, Language::it, true);
    add("clue_en", prompts::clue_en, Language::en, true);
    add("check_it", prompts::check_it, Language::it, false);
    add("check_en", prompts::check_en, Language::en, false);
    add("pathb_gen", detail::pathb_gen_body(), Language::en, true);
    add("pathb_judge", detail::pathb_judge_body(), Language::en, false);
    return m;
  }();
  return templates;
}

inline const PromptTemplate& find_template(std::string_view id) {
  const auto& reg = registry();
  const auto it = reg.find(id);
  if (it == reg.end()) fail(Errc::UnknownTemplate, "no template named '" + std::string(id) + "'");
  return it->second;
}

namespace detail {

inline bool is_slot_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls on_slot(name) for every `{name}` and on_text(chunk) for literal text.
template <typename OnText, typename OnSlot>
void scan(std::string_view body, OnText on_text, OnSlot on_slot) {
  std::size_t i = 0;
  std::size_t literal_start = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_slot_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}' && j > i + 1) {
        on_text(body.substr(literal_start, i - literal_start));
        on_slot(body.substr(i + 1, j - i - 1));
        i = j + 1;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  on_text(body.substr(literal_start));
}

}  // namespace detail

inline std::set<std::string> slots(const PromptTemplate& t) {
  std::set<std::string> names;
  detail::scan(t.body, [](std::string_view) {}, [&](std::string_view name) { names.emplace(name); });
  return names;
}

/// Single-pass slot substitution; bound values are never rescanned.
inline std::string render(const PromptTemplate& t, const Bindings& inputs) {
  std::string out;
  out.reserve(t.body.size() + 256);
  detail::scan(
      t.body, [&](std::string_view chunk) { out.append(chunk); },
      [&](std::string_view name) {
        const auto it = inputs.find(std::string(name));
        if (it == inputs.end()) {
          fail(Errc::UnboundSlot, "template '" + t.id + "' needs slot {" + std::string(name) + "}");
        }
        out.append(it->second);
      });
  return out;
}

inline std::string render(std::string_view template_id, const Bindings& inputs) {
  return render(find_template(template_id), inputs);
}

}  // namespace crux::llm
