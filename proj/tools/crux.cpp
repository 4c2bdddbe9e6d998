// crux: command-line front end for the corpus tools, both clue pipelines,
// the schema generator and the curation service.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crux/crux.hpp"

namespace {

using namespace crux;

struct ProviderOpts {
  std::string provider = "live";
  std::string fixtures;
  std::string record;
  std::string cache;
  std::string model = "gpt-4o-mini";
  std::size_t max_in_flight = 4;
};

void add_provider_flags(CLI::App* cmd, ProviderOpts& o) {
  cmd->add_option("--provider", o.provider, "live or mock")->check(CLI::IsMember({"live", "mock"}));
  cmd->add_option("--fixtures", o.fixtures, "JSONL fixture file for --provider mock");
  cmd->add_option("--record", o.record, "append every provider exchange to this JSONL file");
  cmd->add_option("--cache", o.cache, "persistent response cache (JSONL)");
  cmd->add_option("--model", o.model, "model id sent to the provider");
  cmd->add_option("--max-in-flight", o.max_in_flight, "concurrent provider calls");
}

std::unique_ptr<llm::Gateway> make_gateway(const ProviderOpts& o) {
  std::shared_ptr<llm::Provider> provider;
  if (o.provider == "mock") {
    if (o.fixtures.empty()) fail(Errc::InvalidArgument, "--provider mock needs --fixtures");
    provider = llm::MockProvider::from_file(o.fixtures);
  } else {
    provider = std::make_shared<llm::LiveProvider>(llm::LiveProviderConfig::from_env());
  }
  if (!o.record.empty()) provider = std::make_shared<llm::RecordingProvider>(provider, o.record);
  llm::GatewayOptions go;
  go.max_in_flight = o.max_in_flight;
  if (!o.cache.empty()) go.cache_file = o.cache;
  return std::make_unique<llm::Gateway>(provider, go);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::FileNotFound, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::FileNotFound, "cannot write " + path);
  out << body;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    write_file(path, j.dump(2) + "\n");
  }
}

dataset::Format format_of(const std::string& name, const std::string& path) {
  if (name == "csv") return dataset::Format::csv;
  if (name == "tsv") return dataset::Format::tsv;
  return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? dataset::Format::csv : dataset::Format::tsv;
}

Language language_of(const std::string& s) {
  const auto l = parse_language(s);
  if (!l) fail(Errc::InvalidArgument, "language must be it or en");
  return *l;
}

// Reads a pairs file, reporting rejected rows on stderr.
std::vector<ClueAnswerPair> load_pairs(const std::string& path, Language lang, std::string format = "auto") {
  auto in = dataset::ingest(path, format_of(format, path), lang);
  for (const auto& r : in.rejects) std::cerr << path << ":" << r.line_no << ": rejected (" << r.reason << ")\n";
  return dataset::to_pairs(in.records);
}

std::vector<std::string> read_lines(const std::string& path) {
  const auto body = read_file(path);
  std::vector<std::string> out;
  for (auto line : text::split_lines(body)) {
    const auto t = text::trim(line);
    if (!t.empty() && t.front() != '#') out.emplace_back(t);
  }
  return out;
}

std::string data_dir_default() {
  const char* env = std::getenv("CRUX_DATA_DIR");
  return env && *env ? env : "crux-data";
}

service::Server* running_server = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crossword clue generation and schema construction"};
  app.require_subcommand(1);

  // ingest
  std::string in_path, out_path, format = "auto", lang = "it";
  bool keep_duplicates = false;
  auto* ingest = app.add_subcommand("ingest", "clean and deduplicate a TSV/CSV corpus");
  ingest->add_option("--input", in_path)->required();
  ingest->add_option("--format", format)->check(CLI::IsMember({"auto", "tsv", "csv"}));
  ingest->add_option("--lang", lang);
  ingest->add_option("--out", out_path)->required();
  ingest->add_flag("--keep-duplicates", keep_duplicates);

  // stats
  std::string report_path;
  auto* stats = app.add_subcommand("stats", "answer-length histogram of a corpus");
  stats->add_option("--input", in_path)->required();
  stats->add_option("--format", format)->check(CLI::IsMember({"auto", "tsv", "csv"}));
  stats->add_option("--out", report_path);

  // split
  double fraction = 0.8;
  std::uint64_t seed = 42;
  std::string train_path, test_path;
  auto* split = app.add_subcommand("split", "seeded train/test split");
  split->add_option("--input", in_path)->required();
  split->add_option("--fraction", fraction);
  split->add_option("--seed", seed);
  split->add_option("--train", train_path)->required();
  split->add_option("--test", test_path)->required();

  // gen-from-text
  ProviderOpts prov;
  std::size_t min_paragraph = 200, parallel = 1;
  bool skip_failed = false;
  auto* from_text = app.add_subcommand("gen-from-text", "clue-answer pairs from a document");
  from_text->add_option("--input", in_path)->required();
  from_text->add_option("--lang", lang)->check(CLI::IsMember({"it", "en"}));
  from_text->add_option("--out", out_path)->required();
  from_text->add_option("--report", report_path);
  from_text->add_option("--min-paragraph", min_paragraph);
  from_text->add_option("--parallel", parallel);
  from_text->add_flag("--skip-failed", skip_failed);
  add_provider_flags(from_text, prov);

  // gen-from-keywords
  std::string keywords_path, corpus_path;
  std::size_t n = 3, exemplar_count = 10;
  auto* from_kw = app.add_subcommand("gen-from-keywords", "candidate clues for given keywords");
  from_kw->add_option("--keywords", keywords_path)->required();
  from_kw->add_option("--n", n);
  from_kw->add_option("--out", out_path)->required();
  from_kw->add_option("--corpus", corpus_path, "few-shot exemplars are drawn from this pairs file");
  from_kw->add_option("--exemplars", exemplar_count);
  from_kw->add_option("--seed", seed);
  add_provider_flags(from_kw, prov);

  // eval-judge
  std::string pairs_path, judge = "zero_shot_guideline";
  auto* eval = app.add_subcommand("eval-judge", "score a judge against labelled pairs");
  eval->add_option("--pairs", pairs_path)->required();
  eval->add_option("--judge", judge)->check(CLI::IsMember({"zero_shot_guideline", "external_model"}));
  eval->add_option("--report", report_path);
  eval->add_option("--parallel", parallel);
  add_provider_flags(eval, prov);

  // gen-schema
  std::string preferred_path, text_out, fr_denominator = "bbox";
  schema::GenerationConfig gcfg;
  double max_seconds = 10.0;
  auto* gen = app.add_subcommand("gen-schema", "build a numbered crossword from pairs");
  gen->add_option("--pairs", pairs_path)->required();
  gen->add_option("--preferred", preferred_path, "one preferred answer per line");
  gen->add_option("--width", gcfg.width);
  gen->add_option("--height", gcfg.height);
  gen->add_option("--min-words", gcfg.min_words);
  gen->add_option("--min-fill", gcfg.min_fill_ratio);
  gen->add_option("--max-restarts", gcfg.max_restarts);
  gen->add_option("--max-seconds", max_seconds);
  gen->add_option("--preferred-weight", gcfg.preferred_weight);
  gen->add_option("--removal-probability", gcfg.removal_probability);
  gen->add_option("--fr-denominator", fr_denominator)->check(CLI::IsMember({"bbox", "work_area"}));
  gen->add_option("--seed", gcfg.seed);
  gen->add_option("--lang", lang);
  gen->add_option("--out", out_path);
  gen->add_option("--text", text_out, "also write the printable form here");

  // serve
  std::string host = "127.0.0.1", data_dir = data_dir_default();
  int port = 8080;
  bool judge_keywords = false;
  auto* serve = app.add_subcommand("serve", "HTTP API for the curation workflow");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--data-dir", data_dir);
  serve->add_option("--lang", lang)->check(CLI::IsMember({"it", "en"}));
  serve->add_option("--corpus", corpus_path);
  serve->add_flag("--judge-keywords", judge_keywords, "attach judge verdicts to keyword-driven pairs");
  add_provider_flags(serve, prov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto result = dataset::ingest(in_path, format_of(format, in_path), language_of(lang));
      const auto before = result.records.size();
      auto records = keep_duplicates ? result.records : dataset::dedup(result.records);
      dataset::export_tsv(out_path, records);
      dataset::write_rejects(out_path + ".rejects", result.rejects);
      std::cerr << "read " << before << " records, wrote " << records.size() << ", rejected "
                << result.rejects.size() << "\n";
    } else if (*stats) {
      auto result = dataset::ingest(in_path, format_of(format, in_path));
      write_json(report_path, dataset::histogram_json(dataset::length_histogram(dataset::dedup(result.records))));
    } else if (*split) {
      auto result = dataset::ingest(in_path, format_of(format, in_path));
      auto [train, test] = dataset::split(result.records, fraction, seed);
      dataset::export_tsv(train_path, train);
      dataset::export_tsv(test_path, test);
      std::cerr << "train " << train.size() << ", test " << test.size() << "\n";
    } else if (*from_text) {
      auto gw = make_gateway(prov);
      pipeline::PathAConfig cfg;
      cfg.language = language_of(lang);
      cfg.min_paragraph_chars = min_paragraph;
      cfg.model_id = prov.model;
      cfg.max_parallel = parallel;
      cfg.skip_failed_paragraphs = skip_failed;
      auto result = pipeline::run_path_a(*gw, read_file(in_path), cfg);
      dataset::export_tsv(out_path, dataset::to_records(result.pairs, in_path));
      if (!report_path.empty()) write_json(report_path, result.report);
      std::cerr << result.pairs.size() << " pairs kept\n";
    } else if (*from_kw) {
      auto gw = make_gateway(prov);
      pipeline::KeywordGenParams params;
      params.model = llm::default_params("pathb_gen", prov.model);
      if (!corpus_path.empty()) params.exemplars = pipeline::sample_exemplars(load_pairs(corpus_path, Language::it), exemplar_count, seed);
      std::vector<ClueAnswerPair> pairs;
      for (const auto& k : read_lines(keywords_path)) {
        for (auto& p : pipeline::generate_clues_for_keyword(*gw, k, n, params)) pairs.push_back(std::move(p));
      }
      dataset::export_tsv(out_path, dataset::to_records(pairs, keywords_path));
      std::cerr << pairs.size() << " candidate pairs\n";
    } else if (*eval) {
      auto gw = make_gateway(prov);
      pipeline::JudgeBackend backend;
      backend.judge_id = judge;
      backend.kind = judge == "external_model" ? pipeline::JudgeKind::external_model : pipeline::JudgeKind::zero_shot_guideline;
      backend.params = llm::default_params("pathb_judge", prov.model);
      pipeline::GatewayJudge j(*gw, backend);
      const auto metrics = pipeline::evaluate_judge(j, load_pairs(pairs_path, Language::it), parallel);
      nlohmann::json report = metrics;
      report["judge_id"] = judge;
      write_json(report_path, report);
    } else if (*gen) {
      gcfg.max_duration = std::chrono::milliseconds(static_cast<long>(max_seconds * 1000.0));
      gcfg.fr_denominator = fr_denominator == "work_area" ? schema::FrDenominator::work_area : schema::FrDenominator::bbox;
      const auto pairs = load_pairs(pairs_path, language_of(lang));
      std::set<std::string> preferred;
      if (!preferred_path.empty()) {
        for (auto& a : read_lines(preferred_path)) preferred.insert(std::move(a));
      }
      const auto result = schema::generate(pairs, preferred, gcfg);
      const auto puzzle = service::assign_numbering(result.grid, pairs, result.score);
      const auto json_text = service::export_puzzle(puzzle, service::ExportFormat::json);
      if (out_path.empty() || out_path == "-") {
        std::cout << json_text;
      } else {
        write_file(out_path, json_text);
      }
      if (!text_out.empty()) write_file(text_out, service::export_puzzle(puzzle, service::ExportFormat::text));
      std::cerr << "score " << result.score.score << " (fw " << result.score.fw << ", ll " << result.score.ll
                << "), " << result.restarts << " restarts, " << to_string(result.stop) << "\n";
    } else if (*serve) {
      auto gw = make_gateway(prov);
      service::ServiceOptions opts;
      opts.path_a.language = language_of(lang);
      opts.path_a.model_id = prov.model;
      opts.judge.params = llm::default_params("pathb_judge", prov.model);
      opts.judge_keyword_pairs = judge_keywords;
      if (!corpus_path.empty()) opts.exemplars = load_pairs(corpus_path, Language::it);
      service::Service svc(*gw, data_dir, opts);
      service::Server server(svc);
      running_server = &server;
      std::signal(SIGINT, [](int) {
        if (running_server) running_server->stop();
      });
      std::cerr << "listening on " << host << ":" << port << ", data in " << data_dir << "\n";
      if (!server.listen(host, port)) fail(Errc::InvalidArgument, "cannot listen on " + host + ":" + std::to_string(port));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
