// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Expected values come from the oracles in this file
// or from committed golden files, never from the code under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crux/crux.hpp"

using namespace crux;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = CRUX_TEST_DATA;

// Tolerances.
constexpr double score_rel_tol = 1e-12;
constexpr double f1_rel_tol = 1e-12;
constexpr double metric_fixture_tol = 1e-4;
// Allowance for the step in flight when the clock runs out.
constexpr auto step_slack = std::chrono::milliseconds(100);

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-22s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a criterion; an escaped exception counts as a failure.
void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
  try {
    const auto [ok, detail] = fn();
    report(ok, name, detail);
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

std::vector<ClueAnswerPair> load_pairs(const std::string& name) {
  return dataset::to_pairs(dataset::ingest(data_dir / name, dataset::Format::tsv).records);
}

std::vector<std::string> grid_answers(const std::vector<ClueAnswerPair>& pairs) {
  std::vector<std::string> out;
  for (const auto& p : pairs) out.push_back(p.answer_grid);
  return out;
}

// Brute-force cell scan: words are maximal runs of two or more letters,
// linked letters are cells with a filled neighbour both across and down.
struct CellScan {
  int fw = 0, ll = 0, letters = 0;
  long area = 0;
  double score = 0;
};

CellScan cell_scan(const schema::Grid& g, bool work_area) {
  CellScan s;
  int top = g.height(), left = g.width(), bottom = -1, right = -1;
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (!g.filled(r, c)) continue;
      ++s.letters;
      top = std::min(top, r);
      bottom = std::max(bottom, r);
      left = std::min(left, c);
      right = std::max(right, c);
      const bool h = g.filled(r, c - 1) || g.filled(r, c + 1);
      const bool v = g.filled(r - 1, c) || g.filled(r + 1, c);
      if (h && v) ++s.ll;
      if (h && !g.filled(r, c - 1)) ++s.fw;
      if (v && !g.filled(r - 1, c)) ++s.fw;
    }
  }
  if (work_area) {
    s.area = static_cast<long>(g.width()) * g.height();
  } else if (s.letters > 0) {
    s.area = static_cast<long>(bottom - top + 1) * (right - left + 1);
  }
  // (FW + LL/2) * (letters/area) * (LL/letters), collapsed.
  if (s.area > 0) s.score = (2.0 * s.fw + s.ll) * s.ll / (2.0 * static_cast<double>(s.area));
  return s;
}

bool scan_matches(const schema::Grid& g) {
  for (bool work : {false, true}) {
    const auto b = schema::score(g, work ? schema::FrDenominator::work_area : schema::FrDenominator::bbox);
    const auto o = cell_scan(g, work);
    if (b.fw != o.fw || b.ll != o.ll || b.letters != o.letters || b.area != o.area) return false;
    if (!close_rel(b.score, o.score, score_rel_tol)) return false;
  }
  return true;
}

std::pair<bool, std::string> score_oracle() {
  const auto start = Clock::now();
  const auto pool = grid_answers(load_pairs("pool30_it.tsv"));

  auto cat = schema::place(schema::Grid(15, 15), {"CAT", 0, 0, schema::Direction::across});
  cat = schema::place(cat, {"AXE", 0, 1, schema::Direction::down});
  const bool pinned = close_rel(schema::score(cat).score, 25.0 / 90.0, score_rel_tol) && scan_matches(cat);

  Rng rng(1000);
  int grids = 0, mismatches = 0, removals = 0;
  for (int i = 0; i < 1000; ++i) {
    schema::Grid g(15, 15);
    std::set<std::string> used;
    const int steps = 2 + static_cast<int>(rng.below(24));
    for (int s = 0; s < steps; ++s) {
      const auto n = g.placements().size();
      if (n > 0 && rng.chance(0.25)) {
        const auto k = 1 + rng.below(std::min<std::size_t>(3, n));
        for (std::size_t j = 0; j < k; ++j) used.erase(g.placements()[n - 1 - j].answer);
        g = schema::remove_last(g, k);
        ++removals;
      } else {
        const auto& word = pool[rng.below(pool.size())];
        if (used.count(word)) continue;
        const auto options = schema::legal_placements(g, word);
        if (options.empty()) continue;
        g = schema::place(g, options[rng.below(options.size())].placement);
        used.insert(word);
      }
      if (!scan_matches(g)) ++mismatches;
    }
    if (!scan_matches(g)) ++mismatches;
    ++grids;
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << grids << " grids, " << removals << " removals, " << mismatches << " mismatches, CAT/AXE "
    << (pinned ? "25/90" : "wrong") << ", " << secs << " s (limit 10)";
  return {pinned && mismatches == 0 && secs < 10.0, d.str()};
}

struct GenRun {
  bool valid;
  bool best_of;
  bool on_time;
  bool restarts_ok;
};

GenRun check_run(const std::vector<std::string>& pool, const schema::GenerationConfig& cfg) {
  const auto t0 = Clock::now();
  const auto r = schema::generate_answers(pool, {}, cfg);
  const auto wall = Clock::now() - t0;
  double best_trace = 0;
  for (const auto& t : r.trace) best_trace = std::max(best_trace, t.score.score);
  return {schema::validity_oracle(r.grid, {pool.begin(), pool.end()}, cfg.fr_denominator).valid,
          r.score.score >= best_trace, wall <= cfg.max_duration + step_slack, r.restarts <= cfg.max_restarts};
}

std::pair<bool, std::string> grid_validity(std::vector<GenRun>& runs) {
  const auto start = Clock::now();
  const auto pool = grid_answers(load_pairs("pool20_it.tsv"));
  int valid = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    schema::GenerationConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    runs.push_back(check_run(pool, cfg));
    valid += runs.back().valid;
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << valid << "/100 valid on " << pool.size() << " answers, 15x15, min_words 8, " << secs << " s (limit 60)";
  return {valid == 100 && secs < 60.0, d.str()};
}

std::pair<bool, std::string> best_of_and_budget(std::vector<GenRun> runs) {
  const auto pool = grid_answers(load_pairs("pool20_it.tsv"));
  // Extra runs where the budget, not success, ends the search.
  for (int seed = 1; seed <= 5; ++seed) {
    schema::GenerationConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.min_words = 40;
    cfg.max_restarts = 1'000'000;
    cfg.max_duration = std::chrono::milliseconds(300);
    runs.push_back(check_run(pool, cfg));
    cfg.max_restarts = 3;
    cfg.max_duration = std::chrono::seconds(30);
    runs.push_back(check_run(pool, cfg));
  }
  int best = 0, time = 0, restarts = 0;
  for (const auto& r : runs) {
    best += r.best_of;
    time += r.on_time;
    restarts += r.restarts_ok;
  }
  const int n = static_cast<int>(runs.size());
  std::ostringstream d;
  d << n << " runs: best-of " << best << ", within time+slack " << time << ", restarts within budget " << restarts;
  return {best == n && time == n && restarts == n, d.str()};
}

std::string seed42_puzzle() {
  const auto pairs = load_pairs("pool20_it.tsv");
  schema::GenerationConfig cfg;
  cfg.seed = 42;
  const auto r = schema::generate(pairs, {}, cfg);
  return service::export_puzzle(service::assign_numbering(r.grid, pairs, r.score), service::ExportFormat::json);
}

std::pair<bool, std::string> determinism() {
  const auto a = seed42_puzzle();
  const auto b = seed42_puzzle();
  const auto golden = read(data_dir / "golden_seed42.json");
  std::ostringstream d;
  d << "two runs " << (a == b ? "identical" : "differ") << ", golden " << (a == golden ? "matches" : "differs");
  return {a == b && a == golden, d.str()};
}

std::pair<bool, std::string> preferred_effect() {
  const auto pool = grid_answers(load_pairs("pool30_it.tsv"));
  std::set<std::string> preferred;
  for (std::size_t i = 0; i < pool.size(); i += 5) preferred.insert(pool[i]);
  double pref_rate = 0, other_rate = 0;
  const int runs = 50;
  for (int seed = 1; seed <= runs; ++seed) {
    schema::GenerationConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.preferred_weight = 5;
    const auto r = schema::generate_answers(pool, preferred, cfg);
    int p = 0, o = 0;
    for (const auto& pl : r.grid.placements()) (preferred.count(pl.answer) ? p : o) += 1;
    pref_rate += static_cast<double>(p) / static_cast<double>(preferred.size());
    other_rate += static_cast<double>(o) / static_cast<double>(pool.size() - preferred.size());
  }
  pref_rate /= runs;
  other_rate /= runs;
  std::ostringstream d;
  d << preferred.size() << " preferred of " << pool.size() << ", mean placement rate " << pref_rate << " vs "
    << other_rate;
  return {preferred.size() == 6 && pref_rate > other_rate, d.str()};
}

std::pair<bool, std::string> path_a_golden() {
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"conoscenze", "informazioni acquisite tramite ricerca organizzata con procedimenti metodici e rigorosi."},
      {"ricerca",
       "attività organizzata prevalentemente con procedimenti metodici e rigorosi finalizzata allottenimento di "
       "conoscenze."},
      {"rigorosi", "esatti e precisi nello svolgimento delle azioni."},
      {"assiomi", "un insieme di verità accettate come base dei ragionamenti logici."},
      {"ipotesi", "assunte per comprendere le osservazioni sperimentali e testare le conoscenze"},
      {"Galileo", "egli introdusse il metodo sperimentale nel processo di scienza moderna."},
  };
  llm::GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  llm::Gateway gw(llm::MockProvider::from_file(data_dir / "path_a_golden.jsonl"), o);
  pipeline::PathAConfig cfg;
  cfg.language = Language::it;
  const auto result = pipeline::run_path_a(gw, read(data_dir / "science_it.txt"), cfg);
  bool exact = result.pairs.size() == expected.size();
  for (std::size_t i = 0; exact && i < expected.size(); ++i) {
    exact = result.pairs[i].answer_display == expected[i].first && result.pairs[i].clue == expected[i].second;
  }
  const auto& r = result.report;
  const bool monotone = r.keywords_extracted >= r.keywords_kept && r.keywords_kept >= r.clues_generated &&
                        r.clues_generated >= r.clues_checked && r.clues_checked >= r.clues_kept;
  // Every filter must have removed something on this document.
  const bool exercised = r.keywords_extracted > r.keywords_kept && r.clues_self_contained > 0 &&
                         r.clues_checked > r.clues_kept;
  std::ostringstream d;
  d << result.pairs.size() << " pairs " << (exact ? "exact" : "differ") << "; stages " << r.keywords_extracted << ">"
    << r.keywords_kept << ">" << r.clues_generated << "-" << r.clues_self_contained << ">" << r.clues_checked << ">"
    << r.clues_kept;
  return {exact && monotone && exercised, d.str()};
}

std::pair<bool, std::string> dataset_pipeline() {
  const auto path = data_dir / "corpus1000.tsv";
  const auto ingested = dataset::ingest(path, dataset::Format::tsv);
  const auto once = dataset::dedup(ingested.records);
  const bool idempotent = dataset::dedup(once) == once;

  // Independent scan of the raw file; this fixture's answers are plain A-Z.
  std::map<std::size_t, std::size_t> pairs_by_len;
  std::map<std::size_t, std::set<std::string>> answers_by_len;
  std::set<std::pair<std::string, std::string>> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    std::string clue = line.substr(0, t1);
    std::string answer = line.substr(t1 + 1, t2 - t1 - 1);
    for (auto& c : answer) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (!rows.insert({clue, answer}).second) continue;
    ++pairs_by_len[answer.size()];
    answers_by_len[answer.size()].insert(answer);
  }
  const auto hist = dataset::length_histogram(once);
  bool totals = hist.size() == pairs_by_len.size();
  std::size_t sum = 0;
  for (const auto& [len, bucket] : hist) {
    totals = totals && bucket.unique_pairs == pairs_by_len[len] && bucket.unique_answers == answers_by_len[len].size();
    sum += bucket.unique_pairs;
  }
  totals = totals && sum == once.size();

  const auto a = dataset::split(once, 0.8, 42);
  const auto b = dataset::split(once, 0.8, 42);
  const bool sizes = a.first.size() == 800 && a.second.size() == 200;
  const bool same = a == b;
  std::ostringstream d;
  d << ingested.records.size() << " rows, " << once.size() << " after dedup, idempotent " << (idempotent ? "yes" : "no")
    << ", histogram " << (totals ? "exact" : "off") << ", split " << a.first.size() << "/" << a.second.size() << ", "
    << (same ? "deterministic" : "unstable");
  return {ingested.records.size() == 1000 && idempotent && totals && sizes && same, d.str()};
}

std::pair<bool, std::string> metrics() {
  // tp 3, fp 1, tn 4, fn 2.
  const std::vector<bool> pred{true, true, true, true, false, false, false, false, false, false};
  const std::vector<bool> gold{true, true, true, false, true, true, false, false, false, false};
  const auto m = compute_metrics(pred, gold);
  const bool fixture = std::fabs(m.accuracy - 0.7) < 1e-12 && std::fabs(m.precision - 0.75) < 1e-12 &&
                       std::fabs(m.recall - 0.6) < 1e-12 && std::fabs(m.f1 - 0.6667) < metric_fixture_tol;

  Rng rng(5150);
  int identity = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto tp = rng.below(40), fp = rng.below(40), tn = rng.below(40), fn = rng.below(40) + (i == 0 ? 1 : 0);
    std::vector<bool> p, g;
    auto add = [&](std::uint64_t n, bool pv, bool gv) {
      for (std::uint64_t k = 0; k < n; ++k) {
        p.push_back(pv);
        g.push_back(gv);
      }
    };
    add(tp, true, true);
    add(fp, true, false);
    add(tn, false, false);
    add(fn, false, true);
    const auto r = compute_metrics(p, g);
    const double expected_f1 = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    const bool counts = r.counts == ConfusionCounts{tp, fp, tn, fn};
    identity += counts && close_rel(r.f1, expected_f1, f1_rel_tol);
  }
  std::ostringstream d;
  d << "fixture (" << m.accuracy << ", " << m.precision << ", " << m.recall << ", " << m.f1 << "), F1 identity "
    << identity << "/1000";
  return {fixture && identity == 1000, d.str()};
}

std::pair<bool, std::string> service_e2e() {
  const auto dir = fs::temp_directory_path() / ("crux_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  llm::GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  llm::Gateway gw(llm::MockProvider::from_file(data_dir / "path_a_golden.jsonl"), o);
  service::ServiceOptions opts;
  opts.path_a.language = Language::it;
  service::Service svc(gw, dir, opts);
  service::Server server(svc);
  httplib::Client cli("127.0.0.1", server.start());
  const std::string json = "application/json";

  std::vector<std::string> problems;
  auto expect = [&](const httplib::Result& r, int status, const std::string& what) {
    if (!r || r->status != status) {
      problems.push_back(what + " -> " + (r ? std::to_string(r->status) : std::string("no response")));
      return false;
    }
    return true;
  };

  const auto body = nlohmann::json{{"document", read(data_dir / "science_it.txt")}, {"lang", "it"}}.dump();
  auto created = cli.Post("/api/pipeline/text", body, json);
  if (!expect(created, 201, "create")) return {false, problems.front()};
  const auto session = nlohmann::json::parse(created->body);
  const std::string sid = session.at("session_id");
  const std::string base = "/api/sessions/" + sid;

  expect(cli.Post(base + "/generate", "{}", json), 422, "generate with no accepted pairs");
  for (const char* pid : {"p1", "p2", "p3", "p4"}) {
    expect(cli.Patch(base + "/pairs/" + pid, R"({"status":"accepted"})", json), 200, std::string("accept ") + pid);
  }
  auto gen = cli.Post(base + "/generate", R"({"config":{"seed":42,"min_words":4,"min_fill_ratio":0}})", json);
  bool golden = false;
  if (expect(gen, 201, "generate")) {
    const auto id = nlohmann::json::parse(gen->body).at("puzzle_id").get<std::string>();
    auto exported = cli.Get("/api/puzzles/" + id + "?format=json");
    golden = expect(exported, 200, "export") && exported->body == read(data_dir / "service_e2e_puzzle.json");
  }

  expect(cli.Get("/api/sessions/sdoesnotexist"), 404, "unknown session");
  expect(cli.Get("/api/puzzles/zdoesnotexist"), 404, "unknown puzzle");
  expect(cli.Patch(base + "/pairs/p99", R"({"status":"accepted"})", json), 404, "unknown pair");
  expect(cli.Patch(base + "/pairs/p1", R"({"status":"rejected"})", json), 409, "accepted -> rejected");
  expect(cli.Patch(base + "/pairs/p5", R"({"status":"bogus"})", json), 400, "bad status");
  expect(cli.Post("/api/pipeline/text", "{broken", json), 400, "malformed body");
  server.stop();
  fs::remove_all(dir);

  std::ostringstream d;
  d << session.at("pairs").size() << " pairs, export " << (golden ? "matches golden" : "differs from golden") << ", "
    << problems.size() << " status mismatches";
  for (const auto& p : problems) d << "; " << p;
  return {session.at("pairs").size() == 6 && golden && problems.empty(), d.str()};
}

}  // namespace

int main() {
  std::vector<GenRun> runs;
  criterion("score-oracle", score_oracle);
  criterion("grid-validity", [&] { return grid_validity(runs); });
  criterion("best-of-and-budget", [&] { return best_of_and_budget(runs); });
  criterion("determinism", determinism);
  criterion("preferred-effect", preferred_effect);
  criterion("pipeline-golden", path_a_golden);
  criterion("dataset", dataset_pipeline);
  criterion("metrics", metrics);
  criterion("service-e2e", service_e2e);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
