#pragma once

// Corpus ingestion, cleaning, statistics and splitting.
//
// On-disk format is UTF-8 TSV with a header row naming the columns. `clue`
// and `answer` are required; `source` and `label` are optional. A row that
// cannot be used becomes a Reject (line number plus reason) instead of
// aborting the whole file.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crux/core/error.hpp"
#include "crux/core/rng.hpp"
#include "crux/core/text.hpp"
#include "crux/core/types.hpp"

namespace crux::dataset {

enum class Format { tsv, csv };

struct CorpusRecord {
  ClueAnswerPair pair;
  std::string source_file;
  std::size_t line_no = 1;

  friend bool operator==(const CorpusRecord&, const CorpusRecord&) = default;
};

struct Reject {
  std::size_t line_no = 0;
  std::string reason;
  std::string raw;
};

struct IngestResult {
  std::vector<CorpusRecord> records;
  std::vector<Reject> rejects;
};

struct LengthBucket {
  std::size_t unique_pairs = 0;
  std::size_t unique_answers = 0;

  friend bool operator==(const LengthBucket&, const LengthBucket&) = default;
};

using LengthHistogram = std::map<std::size_t, LengthBucket>;

namespace detail {

struct RawRow {
  std::size_t line_no;
  std::vector<std::string> fields;
  std::string raw;
};

inline std::vector<RawRow> read_tsv(std::istream& in) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line_no > 1 && text::trim(line).empty()) continue;
    RawRow row{line_no, {}, line};
    for (auto part : text::split(line, '\t')) row.fields.emplace_back(part);
    rows.push_back(std::move(row));
  }
  return rows;
}

// RFC 4180 style: quoted fields may hold commas, doubled quotes and newlines.
inline std::vector<RawRow> read_csv(std::istream& in) {
  std::vector<RawRow> rows;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (content.starts_with("\xEF\xBB\xBF")) content.erase(0, 3);
  std::size_t line_no = 1;
  std::size_t i = 0;
  while (i < content.size()) {
    RawRow row{line_no, {}, {}};
    const std::size_t row_start = i;
    std::string field;
    bool quoted = false;
    bool row_done = false;
    while (i < content.size() && !row_done) {
      const char c = content[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < content.size() && content[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_no;
          field.push_back(c);
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++line_no;
        row_done = true;
      } else if (c != '\r') {
        field.push_back(c);
      }
      ++i;
    }
    row.fields.push_back(std::move(field));
    row.raw = content.substr(row_start, i - row_start);
    while (!row.raw.empty() && (row.raw.back() == '\n' || row.raw.back() == '\r')) row.raw.pop_back();
    const bool blank = row.fields.size() == 1 && text::trim(row.fields[0]).empty();
    if (!blank || rows.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(text::trim(s));
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace detail

/// Reads a TSV or CSV corpus file. Throws only for a missing file or an
/// unusable header; every bad data row lands in `rejects`.
inline IngestResult ingest(const std::filesystem::path& path, Format format,
                           Language language = Language::it) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::FileNotFound, "cannot open " + path.string());
  const auto rows = format == Format::tsv ? detail::read_tsv(in) : detail::read_csv(in);
  if (rows.empty()) fail(Errc::MalformedHeader, path.string() + " has no header row");

  std::optional<std::size_t> clue_col, answer_col, source_col, label_col;
  const auto& header = rows.front().fields;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = detail::lower_ascii(header[i]);
    if (name == "clue") clue_col = i;
    else if (name == "answer") answer_col = i;
    else if (name == "source") source_col = i;
    else if (name == "label") label_col = i;
  }
  if (!clue_col || !answer_col) {
    fail(Errc::MalformedHeader, path.string() + " header lacks clue/answer columns", rows.front().raw);
  }

  IngestResult result;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto reject = [&](std::string reason) {
      result.rejects.push_back({row.line_no, std::move(reason), row.raw});
    };
    if (row.fields.size() != header.size()) {
      reject("WrongFieldCount");
      continue;
    }
    if (!text::decode_utf8(row.raw)) {
      reject("InvalidUtf8");
      continue;
    }
    const std::string clue(text::trim(row.fields[*clue_col]));
    const std::string answer(text::trim(row.fields[*answer_col]));
    if (clue.empty()) {
      reject("EmptyClue");
      continue;
    }
    auto source = source_col ? parse_source(text::trim(row.fields[*source_col])) : Source::corpus;
    if (!source) {
      reject("UnknownSource");
      continue;
    }
    std::optional<Label> label;
    if (label_col) {
      label = parse_label(detail::lower_ascii(row.fields[*label_col]));
      if (!label) {
        reject("UnknownLabel");
        continue;
      }
    }
    try {
      result.records.push_back(
          {ClueAnswerPair::make(clue, answer, *source, language, label), path.string(), row.line_no});
    } catch (const Error& e) {
      reject(std::string(to_string(e.code())));
    }
  }
  return result;
}

/// Writes records as TSV. A `label` column is emitted only when some record
/// carries a label. Tabs and newlines inside fields become spaces.
inline void export_tsv(std::ostream& out, const std::vector<CorpusRecord>& records) {
  const bool with_label = std::any_of(records.begin(), records.end(),
                                      [](const CorpusRecord& r) { return r.pair.label.has_value(); });
  auto clean = [](std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    return s;
  };
  out << "clue\tanswer\tsource" << (with_label ? "\tlabel" : "") << '\n';
  for (const auto& r : records) {
    out << clean(r.pair.clue) << '\t' << clean(r.pair.answer_display) << '\t' << to_string(r.pair.source);
    if (with_label) out << '\t' << to_string(r.pair.label.value_or(Label::unlabeled));
    out << '\n';
  }
}

inline void export_tsv(const std::filesystem::path& path, const std::vector<CorpusRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::FileNotFound, "cannot write " + path.string());
  export_tsv(out, records);
}

/// Sidecar for rejected rows: `<path>.rejects`, one `line<TAB>reason<TAB>raw` per row.
inline void write_rejects(const std::filesystem::path& path, const std::vector<Reject>& rejects) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::FileNotFound, "cannot write " + path.string());
  out << "line\treason\traw\n";
  for (const auto& r : rejects) {
    std::string raw = r.raw;
    std::replace_if(raw.begin(), raw.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
    out << r.line_no << '\t' << r.reason << '\t' << raw << '\n';
  }
}

inline std::vector<CorpusRecord> to_records(const std::vector<ClueAnswerPair>& pairs,
                                            const std::string& source_file = {}) {
  std::vector<CorpusRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out.push_back({pairs[i], source_file, i + 2});
  return out;
}

inline std::vector<ClueAnswerPair> to_pairs(const std::vector<CorpusRecord>& records) {
  std::vector<ClueAnswerPair> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.pair);
  return out;
}

/// Dedup key: case-folded, whitespace-collapsed clue plus grid answer.
inline std::pair<std::string, std::string> dedup_key(const ClueAnswerPair& p) {
  return {text::casefold_collapse(p.clue), p.answer_grid};
}

/// First occurrence wins; survivors keep their relative order.
inline std::vector<CorpusRecord> dedup(const std::vector<CorpusRecord>& records) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<CorpusRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (seen.insert(dedup_key(r.pair)).second) out.push_back(r);
  }
  return out;
}

inline LengthHistogram length_histogram(const std::vector<CorpusRecord>& records) {
  LengthHistogram hist;
  std::map<std::size_t, std::unordered_set<std::string>> answers;
  for (const auto& r : records) {
    const auto len = r.pair.answer_grid.size();
    ++hist[len].unique_pairs;
    answers[len].insert(r.pair.answer_grid);
  }
  for (auto& [len, bucket] : hist) bucket.unique_answers = answers[len].size();
  return hist;
}

/// `{"by_length": {"2": {"pairs": n, "answers": m}, ...}}`, lengths ascending.
inline nlohmann::ordered_json histogram_json(const LengthHistogram& hist) {
  nlohmann::ordered_json by_length = nlohmann::ordered_json::object();
  for (const auto& [len, bucket] : hist) {
    by_length[std::to_string(len)] = {{"pairs", bucket.unique_pairs}, {"answers", bucket.unique_answers}};
  }
  return {{"by_length", by_length}};
}

/// Seeded shuffle, then the first round(fraction * N) go to train. Each side
/// keeps the input order.
inline std::pair<std::vector<CorpusRecord>, std::vector<CorpusRecord>> split(
    const std::vector<CorpusRecord>& records, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(Errc::InvalidArgument, "train fraction must lie strictly between 0 and 1");
  }
  if (records.size() < 2) fail(Errc::TooFewRecords, "need at least 2 records to split");
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(records.size())));
  std::vector<bool> in_train(records.size(), false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;
  std::pair<std::vector<CorpusRecord>, std::vector<CorpusRecord>> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (in_train[i] ? out.first : out.second).push_back(records[i]);
  }
  return out;
}

}  // namespace crux::dataset
