#include <catch_amalgamated.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "crux/llm/providers.hpp"
#include "crux/pipeline/keyword.hpp"
#include "crux/pipeline/text.hpp"

using namespace crux;
using namespace crux::pipeline;

namespace {

const std::filesystem::path data_dir = CRUX_TEST_DATA;

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

llm::GatewayOptions quiet() {
  llm::GatewayOptions o;
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

std::string paragraph_text() {
  auto t = read(data_dir / "science_it.txt");
  while (!t.empty() && t.back() == '\n') t.pop_back();
  return t;
}

const std::vector<std::pair<std::string, std::string>> science_pairs = {
    {"conoscenze", "informazioni acquisite tramite ricerca organizzata con procedimenti metodici e rigorosi."},
    {"ricerca",
     "attività organizzata prevalentemente con procedimenti metodici e rigorosi finalizzata allottenimento di "
     "conoscenze."},
    {"rigorosi", "esatti e precisi nello svolgimento delle azioni."},
    {"assiomi", "un insieme di verità accettate come base dei ragionamenti logici."},
    {"ipotesi", "assunte per comprendere le osservazioni sperimentali e testare le conoscenze"},
    {"Galileo", "egli introdusse il metodo sperimentale nel processo di scienza moderna."},
};

// Answers from a fixed table of predictions.
class TableJudge : public Judge {
 public:
  explicit TableJudge(std::map<std::string, bool> table) : table_(std::move(table)) {}
  const std::string& id() const override { return id_; }
  QualityVerdict assess(const ClueAnswerPair& p) override { return {table_.at(p.answer_grid), std::nullopt, id_}; }

 private:
  std::map<std::string, bool> table_;
  std::string id_ = "table";
};

}  // namespace

TEST_CASE("split_paragraphs") {
  CHECK(split_paragraphs("A\n\nB", 1).size() == 2);
  CHECK(error_of([] { split_paragraphs("", 1); }) == Errc::EmptyDocument);
  CHECK(error_of([] { split_paragraphs(" \n\n \n", 1); }) == Errc::EmptyDocument);
  CHECK(error_of([] { split_paragraphs("too short", 200); }) == Errc::EmptyDocument);

  const std::string p1(250, 'a'), p3(230, 'c');
  const auto out = split_paragraphs(p1 + "\n\nShort line.\n\n" + p3, 200);
  REQUIRE(out.size() == 2);
  CHECK(out[0].text == p1);
  CHECK(out[1].text == "Short line.\n" + p3);
  CHECK(out[1].index == 1);

  // A short tail joins the last paragraph.
  const auto tail = split_paragraphs(p1 + "\n\nThe end.", 200);
  REQUIRE(tail.size() == 1);
  CHECK(tail[0].text == p1 + "\nThe end.");
}

TEST_CASE("parse_keywords") {
  CHECK(parse_keywords("Parole chiave: conoscenze, ricerca, Galileo") ==
        std::vector<std::string>{"conoscenze", "ricerca", "Galileo"});
  CHECK(parse_keywords("Parole chiave: ricerca, ricerca, Ricerca") == std::vector<std::string>{"ricerca"});
  CHECK(error_of([] { parse_keywords("Here are some words: a, b"); }) == Errc::ParseFailure);
  CHECK(parse_keywords("Keywords: one, two\nFinal keywords: **three**, four.") ==
        std::vector<std::string>{"three", "four"});
  CHECK(parse_keywords("3- Parole chiave finali : assiomi, ipotesi") == std::vector<std::string>{"assiomi", "ipotesi"});
}

TEST_CASE("filter_keywords keeps up to three words") {
  CHECK(filter_keywords({"metodo sperimentale", "sistema di conoscenze ottenute", "Galileo"}) ==
        std::vector<std::string>{"metodo sperimentale", "Galileo"});
  const std::vector<std::string> six{"conoscenze", "ricerca", "rigorosi", "assiomi", "ipotesi", "Galileo"};
  CHECK(filter_keywords(six) == six);
}

TEST_CASE("parse_clues") {
  const std::vector<std::string> kws{"conoscenze", "ricerca", "rigorosi", "assiomi", "ipotesi", "Galileo"};
  SECTION("a label with a space before the colon") {
    const auto g = parse_clues("Galileo : egli introdusse il metodo sperimentale nel processo di scienza moderna.", kws,
                               Language::it);
    REQUIRE(g.pairs.size() == 1);
    CHECK(g.pairs[0].answer_grid == "GALILEO");
    CHECK(g.pairs[0].clue == "egli introdusse il metodo sperimentale nel processo di scienza moderna.");
  }
  SECTION("self-containing clue is dropped") {
    const auto g = parse_clues("Ricerca: la ricerca è un lavoro\nAssiomi: verità di base", kws, Language::it);
    CHECK(g.parsed == 2);
    CHECK(g.self_contained == std::vector<std::string>{"ricerca"});
    REQUIRE(g.pairs.size() == 1);
    CHECK(g.pairs[0].answer_grid == "ASSIOMI");
  }
  SECTION("4 of 6 keywords covered") {
    const auto g = parse_clues(
        "Conoscenze: informazioni acquisite\n- Rigorosi: esatti e precisi\n2. Ipotesi: assunte per capire\n"
        "Un metodo del testo: Galileo",
        kws, Language::it);
    CHECK(g.pairs.size() == 4);
    CHECK(g.missing == std::vector<std::string>{"ricerca", "assiomi"});
    CHECK(g.pairs[3].answer_grid == "GALILEO");
    CHECK(g.pairs[3].clue == "Un metodo del testo");
  }
  SECTION("first clue for a keyword wins, unknown labels ignored") {
    const auto g = parse_clues("Clues:\nAssiomi: primo\nAssiomi: secondo\nEuclide: altro", kws, Language::it);
    REQUIRE(g.pairs.size() == 1);
    CHECK(g.pairs[0].clue == "primo");
  }
  SECTION("nothing matched") {
    CHECK(error_of([&] { parse_clues("no clues here", kws, Language::it); }) == Errc::ParseFailure);
  }
}

TEST_CASE("truth tokens") {
  CHECK(parse_truth_tokens("True\nFalse") == std::vector<bool>{true, false});
  CHECK(parse_truth_tokens("1. True - present\n2. false\n\n3) Vero") == std::vector<bool>{true, false, true});
  CHECK(parse_truth_tokens("nothing") == std::vector<bool>{});
}

TEST_CASE("truth_check keeps by position and fails closed") {
  const Paragraph p{paragraph_text(), 0, "doc"};
  const std::vector<ClueAnswerPair> two{ClueAnswerPair::make("uno", "alfa"), ClueAnswerPair::make("due", "beta")};
  {
    auto mock = std::make_shared<llm::MockProvider>();
    mock->add("", "check_en", "True\nFalse");
    llm::Gateway gw(mock, quiet());
    const auto t = truth_check(gw, two, p, Language::en);
    REQUIRE(t.kept.size() == 1);
    CHECK(t.kept[0].answer_grid == "ALFA");
  }
  {
    auto mock = std::make_shared<llm::MockProvider>();
    mock->add("", "check_en", "True");
    llm::Gateway gw(mock, quiet());
    CHECK(error_of([&] { truth_check(gw, two, p, Language::en); }) == Errc::ParseFailure);
  }
}

TEST_CASE("the assiomi clue checks out against the science paragraph") {
  const Paragraph p{paragraph_text(), 0, "doc"};
  auto mock = std::make_shared<llm::MockProvider>();
  const ClueAnswerPair pair = ClueAnswerPair::make(science_pairs[3].second, science_pairs[3].first);
  const llm::CompletionRequest req{"check_it", {{"clue", pair.clue}, {"text", p.text}}, llm::default_params("check_it")};
  mock->add(llm::request_digest(req), "check_it", "True");
  llm::Gateway gw(mock, quiet());
  const auto t = truth_check(gw, {pair}, p, Language::it);
  REQUIRE(t.kept.size() == 1);
  CHECK(t.kept[0].answer_grid == "ASSIOMI");
}

TEST_CASE("path (a) golden transcript reproduces the six science pairs") {
  llm::Gateway gw(llm::MockProvider::from_file(data_dir / "path_a_golden.jsonl"), quiet());
  PathAConfig cfg;
  cfg.language = Language::it;
  const auto result = run_path_a(gw, read(data_dir / "science_it.txt"), cfg);

  REQUIRE(result.pairs.size() == science_pairs.size());
  for (std::size_t i = 0; i < science_pairs.size(); ++i) {
    CHECK(result.pairs[i].answer_display == science_pairs[i].first);
    CHECK(result.pairs[i].clue == science_pairs[i].second);
    CHECK(result.pairs[i].source == Source::path_a);
  }
  const auto& r = result.report;
  CHECK(r.paragraphs == 1);
  CHECK(r.keywords_extracted == 9);
  CHECK(r.keywords_kept == 8);
  CHECK(r.clues_generated == 8);
  CHECK(r.clues_self_contained == 1);
  CHECK(r.clues_checked == 7);
  CHECK(r.clues_kept == 6);
  CHECK(r.digests.size() == 3);
  CHECK(r.keywords_extracted >= r.keywords_kept);
  CHECK(r.keywords_kept >= r.clues_generated);
  CHECK(r.clues_generated >= r.clues_checked);
  CHECK(r.clues_checked >= r.clues_kept);
}

TEST_CASE("path (a) failure handling") {
  const std::string doc = read(data_dir / "science_it.txt");
  SECTION("a bad stage stops the run by default") {
    auto mock = std::make_shared<llm::MockProvider>();
    mock->add("", "kw_it", "no keyword line");
    llm::Gateway gw(mock, quiet());
    PathAConfig cfg;
    cfg.language = Language::it;
    try {
      run_path_a(gw, doc, cfg);
      FAIL("expected a failure");
    } catch (const PipelineError& e) {
      CHECK(e.code() == Errc::ParseFailure);
      CHECK(e.stage() == "keywords");
      CHECK(e.paragraph() == 0);
    }
  }
  SECTION("or is recorded when skipping is allowed") {
    auto mock = std::make_shared<llm::MockProvider>();
    mock->add("", "kw_it", "no keyword line");
    llm::Gateway gw(mock, quiet());
    PathAConfig cfg;
    cfg.language = Language::it;
    cfg.skip_failed_paragraphs = true;
    const auto result = run_path_a(gw, doc, cfg);
    CHECK(result.pairs.empty());
    REQUIRE(result.report.failures.size() == 1);
    CHECK(result.report.failures[0].error_code == "ParseFailure");
  }
  SECTION("too short a document") {
    auto mock = std::make_shared<llm::MockProvider>();
    llm::Gateway gw(mock, quiet());
    CHECK(error_of([&] { run_path_a(gw, "Breve.", {}); }) == Errc::EmptyDocument);
  }
}

TEST_CASE("path (a) merges parallel paragraphs in order") {
  auto mock = std::make_shared<llm::MockProvider>();
  std::string doc;
  for (int i = 0; i < 4; ++i) {
    const std::string text = "Paragrafo numero " + std::to_string(i) + " sulla parola chiave alfa" + std::string(i, 'x') +
                             ". " + std::string(200, 'z');
    doc += text + "\n\n";
    const std::string kw = "alfa" + std::string(i, 'x');
    const auto kw_req = llm::CompletionRequest{"kw_en", {{"text", text}}, llm::default_params("kw_en")};
    mock->add(llm::request_digest(kw_req), "kw_en", "Keywords: " + kw);
    const auto clue_req =
        llm::CompletionRequest{"clue_en", {{"keywords", kw}, {"text", text}}, llm::default_params("clue_en")};
    mock->add(llm::request_digest(clue_req), "clue_en", kw + ": definizione " + std::to_string(i));
    const auto check_req = llm::CompletionRequest{
        "check_en", {{"clue", "definizione " + std::to_string(i)}, {"text", text}}, llm::default_params("check_en")};
    mock->add(llm::request_digest(check_req), "check_en", "True");
  }
  llm::Gateway gw(mock, quiet());
  PathAConfig cfg;
  cfg.max_parallel = 4;
  const auto result = run_path_a(gw, doc, cfg);
  REQUIRE(result.pairs.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(result.pairs[i].clue == "definizione " + std::to_string(i));
}

TEST_CASE("keyword-driven clue generation") {
  auto mock = std::make_shared<llm::MockProvider>();
  KeywordGenParams params;
  auto request = [&](const std::string& kw, std::size_t n) {
    return llm::CompletionRequest{"pathb_gen", {{"examples", ""}, {"keyword", kw}, {"n", std::to_string(n)}},
                                  params.model};
  };
  mock->add(llm::request_digest(request("Mitologia", 1)), "pathb_gen", "La conosce chi conosce i miti");
  mock->add(llm::request_digest(request("Curiosità", 1)), "pathb_gen", "1. \"Il desiderio di sapere\"");
  mock->add(llm::request_digest(request("Sole", 3)), "pathb_gen", "Una stella\nuna  stella\nUNA STELLA");
  mock->add(llm::request_digest(request("Luna", 3)), "pathb_gen", "Luna piena\nSatellite\nLuna: Notturna");
  llm::Gateway gw(mock, quiet());

  auto mito = generate_clues_for_keyword(gw, "Mitologia", 1, params);
  REQUIRE(mito.size() == 1);
  CHECK(mito[0].clue == "La conosce chi conosce i miti");
  CHECK(mito[0].answer_grid == "MITOLOGIA");
  CHECK(mito[0].source == Source::path_b);

  auto cur = generate_clues_for_keyword(gw, "Curiosità", 1, params);
  REQUIRE(cur.size() == 1);
  CHECK(cur[0].clue == "Il desiderio di sapere");
  CHECK(cur[0].answer_grid == "CURIOSITA");

  CHECK(generate_clues_for_keyword(gw, "Sole", 3, params).size() == 1);

  const auto luna = generate_clues_for_keyword(gw, "Luna", 3, params);
  REQUIRE(luna.size() == 2);
  CHECK(luna[0].clue == "Satellite");
  CHECK(luna[1].clue == "Notturna");
}

TEST_CASE("exemplars are sampled deterministically and formatted one per line") {
  std::vector<ClueAnswerPair> corpus;
  for (const char* a : {"Casa", "Mare", "Sole", "Luna", "Roma"}) corpus.push_back(ClueAnswerPair::make("clue", a));
  const auto a = sample_exemplars(corpus, 3, 9);
  CHECK(a == sample_exemplars(corpus, 3, 9));
  CHECK(a.size() == 3);
  CHECK(sample_exemplars(corpus, 10, 9).size() == 5);
  CHECK(format_exemplars({ClueAnswerPair::make("Abitazione", "Casa"), ClueAnswerPair::make("Astro", "Sole")}) ==
        "CASA: Abitazione\nSOLE: Astro");
}

TEST_CASE("parse_verdict") {
  CHECK(parse_verdict("ACCEPT\nClear and fair.", "j").accepted);
  CHECK(parse_verdict("ACCEPT\nClear and fair.", "j").rationale == "Clear and fair.");
  CHECK_FALSE(parse_verdict("REJECT\nThe clue is ambiguous.", "j").accepted);
  CHECK_FALSE(parse_verdict("Verdict: not acceptable", "j").accepted);
  CHECK(parse_verdict("**Accepted**", "j").accepted);
  CHECK_FALSE(parse_verdict("Unacceptable pair", "j").accepted);
  CHECK(error_of([] { parse_verdict("I am unsure.", "j"); }) == Errc::ParseFailure);
}

TEST_CASE("judging the example table rows") {
  auto mock = std::make_shared<llm::MockProvider>();
  JudgeBackend backend;
  auto request = [&](const std::string& answer, const std::string& clue) {
    return llm::CompletionRequest{"pathb_judge", {{"answer", answer}, {"clue", clue}}, backend.params};
  };
  mock->add(llm::request_digest(request("Elettricità", "Uno dei segni zodiacali")), "pathb_judge",
            "REJECT\nElectricity is not a zodiac sign.");
  mock->add(llm::request_digest(request("Curiosità", "Il desiderio di sapere")), "pathb_judge",
            "ACCEPT\nA precise definition.");
  llm::Gateway gw(mock, quiet());
  GatewayJudge judge(gw, backend);

  const auto no = judge_pair(ClueAnswerPair::make("Uno dei segni zodiacali", "Elettricità"), judge);
  CHECK_FALSE(no.accepted);
  CHECK(no.judge_id == "zero_shot_guideline");
  const auto yes = judge_pair(ClueAnswerPair::make("Il desiderio di sapere", "Curiosità"), judge);
  CHECK(yes.accepted);
  CHECK(yes.rationale == "A precise definition.");
  CHECK(mock->calls() == 2);

  CHECK_FALSE(judge_pair(ClueAnswerPair::make("  ", "Sole"), judge).accepted);
  CHECK_FALSE(judge_pair(ClueAnswerPair::make("Il sole splende", "Sole"), judge).accepted);
  CHECK(mock->calls() == 2);
}

TEST_CASE("evaluate_judge") {
  std::vector<ClueAnswerPair> labeled;
  std::map<std::string, bool> echo, invert, fixed;
  // Labels: first five acceptable. Fixed predictions: A A A A U | A A U U U.
  const std::vector<std::string> answers{"AA", "BB", "CC", "DD", "EE", "FF", "GG", "HH", "II", "JJ"};
  const std::vector<bool> fixed_pred{true, true, true, true, false, true, true, false, false, false};
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const bool ok = i < 5;
    labeled.push_back(ClueAnswerPair::make("clue " + std::to_string(i), answers[i], Source::corpus, Language::it,
                                           ok ? Label::acceptable : Label::unacceptable));
    echo[answers[i]] = ok;
    invert[answers[i]] = !ok;
    fixed[answers[i]] = fixed_pred[i];
  }
  TableJudge e(echo), inv(invert), f(fixed);
  CHECK(evaluate_judge(e, labeled).accuracy == 1.0);
  const auto m_inv = evaluate_judge(inv, labeled);
  CHECK(m_inv.accuracy == 0.0);
  CHECK(m_inv.f1 == 0.0);
  // Hand count: tp 4, fn 1, fp 2, tn 3.
  const auto m = evaluate_judge(f, labeled, 4);
  CHECK(m.counts == ConfusionCounts{4, 2, 3, 1});
  CHECK(m.accuracy == Catch::Approx(0.7));
  CHECK(m.precision == Catch::Approx(4.0 / 6.0));
  CHECK(m.recall == Catch::Approx(0.8));
  CHECK(m.f1 == Catch::Approx(8.0 / 11.0));

  labeled[0].label.reset();
  CHECK(error_of([&] { evaluate_judge(e, labeled); }) == Errc::InvalidArgument);
}
