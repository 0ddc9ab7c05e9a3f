#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "senseprobe/datasets.hpp"
#include "senseprobe/errors.hpp"
#include "senseprobe/pipeline.hpp"
#include "test_paths.hpp"

using namespace senseprobe;
using namespace senseprobe::pipeline;
namespace fs = std::filesystem;
namespace mc = senseprobe::modelclient;

namespace {

const fs::path kData = SENSEPROBE_DATA_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("senseprobe-unit-pipeline-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Config base_config(const fs::path& dir) {
  Config c;
  c.run_dir = dir / "run";
  c.model.model = "synthetic";
  c.model.max_concurrency = 2;
  c.tasks = {TaskConfig{"paws", kData / "benchmarks" / "paws-sample.tsv"},
             TaskConfig{"writers", kData / "facts" / "writers.csv"}};
  c.senses = {"en^P", "de^T"};
  c.conditions = {Condition::full, Condition::I, Condition::X};
  return c;
}

// Reply depends on the prompt, so identical prompts give identical answers.
std::shared_ptr<mc::Client> prompt_hash_model(std::atomic<int>* calls = nullptr) {
  return std::make_shared<mc::FunctionModel>([calls](const mc::CompletionRequest& r) {
    if (calls) ++*calls;
    const auto h = std::hash<std::string>{}(r.prompt);
    if (r.dp_id.front() == 'w') return std::to_string(1800 + h % 3);
    return std::string(h % 2 ? "yes" : "no");
  });
}

// Same, but answers in the language of the request's sense label.
std::shared_ptr<mc::Client> localized_model() {
  return std::make_shared<mc::FunctionModel>([](const mc::CompletionRequest& r) {
    const bool yes = std::hash<std::string>{}(r.prompt) % 2;
    if (r.sense.rfind("de", 0) == 0) return std::string(yes ? "ja" : "nein");
    return std::string(yes ? "yes" : "no");
  });
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config files resolve relative paths and reject unknown values") {
  const fs::path dir = fresh_dir("config");
  std::ofstream(dir / "c.json") << R"({
    "run_dir": "out",
    "model": {"backend": "echo", "model": "e", "max_concurrency": 3},
    "tasks": [{"id": "paws", "path": "data/paws.tsv", "limit": 5}, "arithmetics"],
    "senses": ["de^T"],
    "conditions": ["full", "X", "reference-swap"],
    "references": {"paws": "refs.jsonl"},
    "scoring": {"quality_threshold": 0.7}
  })";
  const Config c = load_config(dir / "c.json");
  CHECK(c.run_dir == dir / "out");
  CHECK(c.tasks[0].path == dir / "data" / "paws.tsv");
  CHECK(c.tasks[0].limit == 5);
  CHECK(c.tasks[1].id == "arithmetics");
  CHECK(c.conditions == std::vector<Condition>{Condition::full, Condition::X});
  CHECK(c.reference_swap);
  CHECK(c.references.at("paws") == dir / "refs.jsonl");
  CHECK(c.scoring.quality_threshold == 0.7);
  CHECK(c.model.max_concurrency == 3);
  CHECK(Config::from_json(c.to_json(), dir).to_json() == c.to_json());

  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"tasks": ["squad"]})"), dir), ConfigError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"senses": ["fr^T"]})"), dir), ConfigError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"conditions": ["Y"]})"), dir), ConfigError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"tasks": 3})"), dir), ConfigError);
  CHECK_THROWS_AS(make_client(ModelConfig{"carrier-pigeon"}), ConfigError);
  ModelConfig oracle;
  oracle.backend = "oracle";
  CHECK_THROWS_AS(make_client(oracle), ConfigError);
}

TEST_CASE("overrides patch both models") {
  Config c;
  c.sense_model = ModelConfig{};
  apply(c, Overrides{std::string("http://localhost:9/v1"), std::string("m2"), 0.5, std::size_t{7}, fs::path("-")});
  CHECK(c.model.base_url == "http://localhost:9/v1");
  CHECK(c.sense_model->model == "m2");
  CHECK(c.model.temperature == 0.5);
  CHECK(c.model.max_concurrency == 7);
  CHECK(c.cache_dir == "-");
}

TEST_CASE("run writes every artifact and resumes from the cache") {
  const fs::path dir = fresh_dir("resume");
  std::atomic<int> calls{0};
  Pipeline first(base_config(dir), prompt_hash_model(&calls), mc::echo_model());
  const auto rows = first.run();
  const int fresh_calls = calls;
  CHECK(fresh_calls > 0);
  const fs::path run = dir / "run";
  for (const char* f : {"manifest.json", "tasks/paws.json", "senses/paws/de^T__X.json", "responses/paws/en__full.jsonl",
                        "responses/paws/id__id-baseline-b.jsonl", "reports/report.json", "reports/report.csv",
                        "reports/consistency.svg", "reports/conditional.json"})
    CHECK_MESSAGE(fs::exists(run / f), f);
  // Facts have no ablation runs.
  CHECK_FALSE(fs::exists(run / "responses/writers/de^T__I.jsonl"));
  // paws: baseline + 2 senses x 3 conditions; writers: baseline + 2 senses.
  CHECK(rows.size() == 10);
  const std::string report = slurp(run / "reports" / "report.json");

  fs::remove_all(run / "responses");
  fs::remove_all(run / "reports");
  Pipeline second(base_config(dir), prompt_hash_model(&calls), mc::echo_model());
  second.run();
  CHECK(calls == fresh_calls);
  CHECK(slurp(run / "reports" / "report.json") == report);

  // Every scored response carries a request hash present in the cache.
  const std::string cache = slurp(run / "cache" / "responses.jsonl");
  const auto loaded = second.load_run("paws", "de^T", Condition::full);
  REQUIRE(loaded);
  CHECK(loaded->records.size() == 8);
  for (const auto& r : loaded->records) {
    CHECK(r.request_hash.size() == 64);
    CHECK(cache.find(r.request_hash) != std::string::npos);
    CHECK(r.from_cache);
  }
}

TEST_CASE("echoed senses keep English prompts but not the English lexicon") {
  const fs::path dir = fresh_dir("echo");
  Pipeline p(base_config(dir), prompt_hash_model(), mc::echo_model());
  for (const auto& row : p.run()) {
    REQUIRE(row.consistency);
    CHECK(row.excluded == 0);
    if (row.task_id == "writers" || row.sense == "id" || row.condition == "X") {
      CHECK(row.consistency->value == 1.0);
    } else {
      // English yes/no replies under a German or paraphrase lexicon.
      CHECK(row.unmapped_sense == (row.sense == "de^T" ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("transport failures exclude datapoints, permanent ones abort") {
  const fs::path dir = fresh_dir("transport");
  Config c = base_config(dir);
  c.tasks.resize(1);
  c.senses = {"de^T"};
  c.conditions = {Condition::full};
  c.baseline = false;
  c.cache_dir = "-";
  auto flaky = std::make_shared<mc::FunctionModel>([](const mc::CompletionRequest& r) -> std::string {
    if (r.dp_id == "000003" && r.sense == "de^T") throw TransportError("timeout", 0);
    return "yes";
  });
  Pipeline p(c, flaky, mc::echo_model());
  const auto rows = p.run();
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 7);
  CHECK(rows[0].excluded == 1);
  CHECK(p.load_run("paws", "de^T", Condition::full)->failures.count("000003") == 1);

  auto broken = std::make_shared<mc::FunctionModel>([](const mc::CompletionRequest&) -> std::string {
    throw PermanentError("HTTP 401", 401);
  });
  Pipeline q(c, broken, mc::echo_model());
  fs::remove_all(dir / "run" / "responses");
  CHECK_THROWS_AS(q.collect_all(), PermanentError);
}

TEST_CASE("unusable senses are skipped and annotated") {
  const fs::path dir = fresh_dir("unusable");
  Config c = base_config(dir);
  c.tasks = {TaskConfig{"belebele", kData / "benchmarks" / "belebele-sample.jsonl"}};
  c.senses = {"en^P", "de^T"};
  c.conditions = {Condition::full};
  auto sense_model = std::make_shared<mc::FunctionModel>([](const mc::CompletionRequest& r) -> std::string {
    const std::string body = r.prompt.substr(r.prompt.find('\n') + 1);
    if (r.sense == "en^P" && !r.dp_id.empty()) return "I answered the question instead: C";
    return body;
  });
  Pipeline p(c, mc::scripted_model({}, std::string("A")), sense_model);
  const auto rows = p.run();
  bool seen = false;
  for (const auto& row : rows) {
    if (row.sense != "en^P") continue;
    seen = true;
    CHECK_FALSE(row.usable);
    CHECK_FALSE(row.note.empty());
    CHECK_FALSE(row.consistency);
  }
  CHECK(seen);
  CHECK_FALSE(fs::exists(dir / "run" / "responses" / "belebele" / "en^P__full.jsonl"));
  CHECK(slurp(dir / "run" / "reports" / "report.csv").find("false,") != std::string::npos);
}

TEST_CASE("reference swap") {
  const fs::path dir = fresh_dir("refswap");
  // References equal to the (echoed) model translations of five of the eight items.
  const Task paws = datasets::load_benchmark(BenchmarkKind::paws, kData / "benchmarks" / "paws-sample.tsv");
  {
    std::ofstream refs(dir / "refs.jsonl");
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& dp = paws.datapoints[i];
      refs << nlohmann::json{{"dp_id", dp.dp_id}, {"lang", "de"}, {"components", dp.fields}}.dump() << "\n";
    }
  }
  Config c = base_config(dir);
  c.tasks.resize(1);
  c.senses = {"de^T", "it^T"};
  c.conditions = {Condition::full};
  c.reference_swap = true;
  c.references["paws"] = dir / "refs.jsonl";
  c.cache_dir = "-";  // replies depend on the sense label, which the request hash ignores
  Pipeline p(c, localized_model(), mc::echo_model());
  const auto rows = p.run();
  const report::Row* full = nullptr;
  const report::Row* swap = nullptr;
  for (const auto& r : rows) {
    if (r.sense == "de^T" && r.condition == "full") full = &r;
    if (r.sense == "de^T" && r.condition == "reference-swap") swap = &r;
    CHECK_FALSE((r.sense == "it^T" && r.condition == "reference-swap"));
  }
  REQUIRE(full);
  REQUIRE(swap);
  CHECK(swap->n == 5);
  CHECK(swap->excluded == 3);
  CHECK(swap->consistency->value == 1.0);
  REQUIRE(full->quality);
  CHECK(full->quality->bleu == 100.0);
  CHECK(full->quality->segments == 5);
  CHECK(fs::exists(dir / "run" / "reports" / "bridge" / "paws__de^T.jsonl"));
}

TEST_CASE("neural scores feed the filtered consistency") {
  const fs::path dir = fresh_dir("neural");
  Config c = base_config(dir);
  c.tasks.resize(1);
  c.senses = {"de^T"};
  c.conditions = {Condition::full};
  c.baseline = false;
  {
    std::ofstream s(dir / "scores.jsonl");
    for (int i = 1; i <= 8; ++i)
      s << nlohmann::json{{"dp_id", "00000" + std::to_string(i)}, {"score", i <= 4 ? 0.9 : 0.5}}.dump() << "\n";
  }
  c.neural_scores["paws/de^T"] = dir / "scores.jsonl";
  c.cache_dir = "-";
  auto answers = std::make_shared<mc::FunctionModel>([](const mc::CompletionRequest& r) -> std::string {
    return r.sense == "de^T" && r.dp_id > "000004" ? "nein" : (r.sense == "de^T" ? "ja" : "yes");
  });
  Pipeline p(c, answers, mc::echo_model());
  const auto rows = p.run();
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].consistency->value == 0.5);
  CHECK(rows[0].neural_mean == doctest::Approx(0.7));
  CHECK(rows[0].filtered_n == 4);
  CHECK(rows[0].filtered_consistency == 1.0);
  CHECK(rows[0].filtered_delta == 0.5);
  const auto corr = p.analyze_correlation();
  REQUIRE(corr.size() == 1);
  CHECK(corr[0].at("pearson") == 1.0);
}

TEST_CASE("matched-language matrix from tagged fact runs") {
  const fs::path dir = fresh_dir("matched");
  Config c = base_config(dir);
  c.tasks = {TaskConfig{"writers", kData / "facts" / "writers.csv"}};
  c.senses = {"de^T", "it^T", "nl^T", "sv^T"};
  c.baseline = false;
  c.cache_dir = "-";
  const Task w = datasets::load_facts_csv(kData / "facts" / "writers.csv", "writers");
  // Correct exactly when the prompt language matches the writer's language.
  auto model = std::make_shared<mc::FunctionModel>([w](const mc::CompletionRequest& r) -> std::string {
    const auto* dp = w.find(r.dp_id);
    const std::string lang = r.sense == "en" ? "en" : r.sense.substr(0, 2);
    return std::string(to_code(*dp->subset_tag)) == lang ? dp->gold.members().front() : "0";
  });
  Pipeline p(c, model, mc::echo_model());
  p.run();
  const auto ml = p.analyze_matched_language();
  REQUIRE(ml.size() == 1);
  CHECK(ml[0].at("accuracy").at("de").at("de") == 1.0);
  CHECK(ml[0].at("accuracy").at("de").at("sv") == 0.0);
  CHECK(ml[0].at("matched")[0] == 0.8);
  CHECK(ml[0].at("mismatched")[0] == -0.2);
}

TEST_CASE("random two-label baseline stays inside the binomial band") {
  // Agreement of two independent uniform runs ~ Binomial(500, 0.5); the
  // central 95% interval of that distribution is [228, 272].
  const fs::path dir = fresh_dir("random-baseline");
  Config c;
  c.run_dir = dir / "run";
  c.cache_dir = "-";
  c.tasks = {TaskConfig{"arithmetics", {}, 500, 1}};
  c.senses = {};
  Pipeline p(c, mc::random_choice_model({"1", "2"}, 42), mc::echo_model());
  const double baseline = p.run_id_baseline(p.task("arithmetics"));
  const long agreeing = std::lround(baseline * 500);
  CHECK(agreeing >= 228);
  CHECK(agreeing <= 272);
}

TEST_CASE("reference swap with references equal to the translations reproduces the full row") {
  const fs::path dir = fresh_dir("refswap-equal");
  const Task paws = datasets::load_benchmark(BenchmarkKind::paws, kData / "benchmarks" / "paws-sample.tsv");
  {
    // The echo sense model returns the English inputs, so these are its translations.
    std::ofstream refs(dir / "refs.jsonl");
    for (const auto& dp : paws.datapoints)
      refs << nlohmann::json{{"dp_id", dp.dp_id}, {"lang", "de"}, {"components", dp.fields}}.dump() << "\n";
  }
  Config c = base_config(dir);
  c.tasks.resize(1);
  c.senses = {"de^T"};
  c.conditions = {Condition::full};
  c.baseline = false;
  c.reference_swap = true;
  c.references["paws"] = dir / "refs.jsonl";
  c.cache_dir = "-";
  Pipeline p(c, localized_model(), mc::echo_model());
  const auto rows = p.run();
  REQUIRE(rows.size() == 2);
  const report::Row& full = rows[0];
  report::Row swap = rows[1];
  REQUIRE(swap.condition == "reference-swap");
  CHECK(swap.excluded == 0);
  // Translation-quality columns belong to the full condition only.
  CHECK_FALSE(swap.quality);
  swap.condition = full.condition;
  swap.quality = full.quality;
  swap.number_translation_accuracy = full.number_translation_accuracy;
  CHECK(report::json_text({swap}) == report::json_text({full}));
}

}
