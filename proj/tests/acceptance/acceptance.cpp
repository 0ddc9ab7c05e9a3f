// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.
//
// The endpoint smoke test talks to an in-process chat-completion server unless
// SENSEPROBE_LIVE_BASE_URL is set; SENSEPROBE_LIVE_MODEL and SENSEPROBE_API_KEY
// then select the model and credentials.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "mock_openai.hpp"
#include "senseprobe/datasets.hpp"
#include "senseprobe/errors.hpp"
#include "senseprobe/matching.hpp"
#include "senseprobe/metrics.hpp"
#include "senseprobe/modelclient.hpp"
#include "senseprobe/mtquality.hpp"
#include "senseprobe/numerals.hpp"
#include "senseprobe/pipeline.hpp"
#include "senseprobe/report.hpp"
#include "senseprobe/rng.hpp"
#include "synthetic_senses.hpp"

#ifndef SENSEPROBE_TEST_FIXTURES
#error "SENSEPROBE_TEST_FIXTURES must point at tests/fixtures"
#endif
#ifndef SENSEPROBE_DATA_DIR
#error "SENSEPROBE_DATA_DIR must point at core/data"
#endif

namespace fs = std::filesystem;
using namespace senseprobe;
namespace mc = senseprobe::modelclient;
namespace pl = senseprobe::pipeline;

namespace {

const fs::path kData = SENSEPROBE_DATA_DIR;
const fs::path kFixtures = SENSEPROBE_TEST_FIXTURES;

struct Outcome {
  bool ok = false;
  std::string detail;
};

// Collects failed expectations; the first few end up in the FAIL line.
class Expect {
 public:
  void operator()(bool ok, const std::string& what) {
    ++checked_;
    if (!ok) misses_.push_back(what);
  }
  Outcome done(const std::string& summary) const {
    if (misses_.empty()) return {true, summary + " (" + std::to_string(checked_) + " checks)"};
    std::string d = std::to_string(misses_.size()) + " of " + std::to_string(checked_) + " checks failed:";
    for (std::size_t i = 0; i < misses_.size() && i < 5; ++i) d += " [" + misses_[i] + "]";
    return {false, d};
  }

 private:
  std::size_t checked_ = 0;
  std::vector<std::string> misses_;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("senseprobe-acceptance-" + name);
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

std::shared_ptr<mc::Client> offline() {
  return std::make_shared<mc::FunctionModel>([](const mc::CompletionRequest&) -> std::string {
    throw ConfigError("scoring must not query the model");
  });
}

// Shipped sample inputs for every built-in task.
pl::TaskConfig sample_task(const std::string& id) {
  pl::TaskConfig t;
  t.id = id;
  if (id == "arithmetics") t.count = 50, t.seed = 5;
  else if (id == "writers" || id == "companies" || id.rfind("olympics", 0) == 0) t.path = kData / "facts" / (id + ".csv");
  else if (id == "paws" || id == "xnli") t.path = kData / "benchmarks" / (id + "-sample.tsv");
  else if (id == "copa" || id == "belebele") t.path = kData / "benchmarks" / (id + "-sample.jsonl");
  return t;
}

std::vector<TaskSpec> all_specs() {
  std::vector<TaskSpec> out;
  for (const auto& id : datasets::known_task_ids()) out.push_back(datasets::make_spec(id));
  return out;
}

// ---- numerals -------------------------------------------------------------

Outcome numerals_round_trip() {
  std::size_t cases = 0, failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (Language lang : kAllLanguages) {
    for (int n = 1; n <= 2000; ++n) {
      ++cases;
      try {
        if (numerals::parse_number(numerals::spell_number(n, lang), lang) != n) ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << cases << " cases, " << failures << " failures, " << seconds << " s";
  return {cases == 10000 && failures == 0 && seconds < 1.0, d.str()};
}

// ---- consistency ----------------------------------------------------------

Outcome consistency_suite() {
  using matching::normalize;
  Expect expect;
  auto cls = [](std::vector<std::string> v) { return AnswerClass::from_variants(v); };
  auto same = [](std::string_view a, std::string_view b, const std::vector<AnswerClass>& c) {
    return matching::consistent(normalize(a), normalize(b), c);
  };

  const std::vector<AnswerClass> morocco = {cls({"Rabat"}), cls({"Marrakesh", "Marrakesch"})};
  expect(same("Marrakesh", "Marrakesch", morocco), "Marrakesh ~ Marrakesch");
  expect(!morocco[0].contains(normalize("Marrakesh").value()), "Marrakesh is incorrect");
  expect(!same("Rabat", "Marrakesh", morocco), "Rabat !~ Marrakesh");

  const std::vector<AnswerClass> berlin = {cls({"Berlin", "Berlijn", "Berlino"})};
  expect(same("Berlino", "Berlin", berlin), "Berlino ~ Berlin");
  expect(same("Berlijn", "berlin", berlin), "Berlijn ~ berlin");
  expect(!same("Berlin", "Bonn", berlin), "Berlin !~ Bonn");

  const std::vector<AnswerClass> paddock = {cls({"Charlie Paddock", "Charles Paddock", "Charles William Paddock"})};
  expect(same("Charles William Paddock", "Charlie Paddock", paddock), "Charles William Paddock ~ Charlie Paddock");
  expect(!same("Charles Paddock", "Jackson Scholz", paddock), "Paddock !~ Scholz");

  // The shipped 1920 row carries the same answer set.
  const Task olympics = datasets::load_facts_csv(kData / "facts" / "olympics-100m.csv", "olympics-100m");
  const Datapoint* m1920 = olympics.find("m1920g");
  expect(m1920 && same("Charles William Paddock", "Charlie Paddock", m1920->all_classes()),
         "shipped 1920 answer set");

  // Exact-match fallback outside every class.
  expect(same("Paris", "paris", berlin), "fallback Paris ~ paris");
  expect(!same("Paris", "Lyon", berlin), "fallback Paris !~ Lyon");

  expect(!matching::labels_consistent(std::nullopt, std::nullopt), "UNMAPPED !~ UNMAPPED");
  expect(matching::labels_consistent(std::string("yes"), std::string("yes")), "yes ~ yes");

  // Through the scoring path: both runs wrong, yet consistent.
  Task task;
  Datapoint dp;
  dp.dp_id = "q";
  dp.gold = morocco[0];
  dp.variant_classes = {morocco[1]};
  task.datapoints = {dp};
  ResponseRecord a, b;
  a.dp_id = b.dp_id = "q";
  a.raw_text = "Marrakesh";
  b.raw_text = "Marrakesch";
  const auto ra = pl::score_records(task, {a}, "en", pl::ScoringMode::exact);
  const auto rb = pl::score_records(task, {b}, "de^T", pl::ScoringMode::exact);
  expect(metrics::consistency(ra, rb, task) == 1.0, "scored consistency 1");
  expect(metrics::accuracy(ra).value == 0.0 && metrics::accuracy(rb).value == 0.0, "scored accuracy 0");
  return expect.done("variant classes, answer sets, fallback");
}

// ---- bound and decomposition ----------------------------------------------

struct Instance {
  Task task;
  metrics::ScoredRun a, b;
};

// Open-QA runs over random vocabularies partitioned into disjoint classes.
Instance random_instance(SplitMix64& rng) {
  Instance in;
  in.task.spec.kind = TaskKind::OpenQa;
  const auto n = static_cast<std::size_t>(rng.uniform(1, 60));
  std::vector<ResponseRecord> ra, rb;
  for (std::size_t i = 0; i < n; ++i) {
    Datapoint dp;
    dp.dp_id = "d" + std::to_string(1000 + i);
    const auto vocab = static_cast<int>(rng.uniform(2, 6));
    const auto n_classes = static_cast<int>(rng.uniform(1, 3));
    std::vector<std::vector<std::string>> members(static_cast<std::size_t>(n_classes));
    std::vector<std::string> words;
    for (int w = 0; w < vocab; ++w) {
      words.push_back("w" + std::to_string(i) + "x" + std::to_string(w));
      // Word 0 is always gold; the others land in a class or nowhere.
      const auto c = w == 0 ? 0 : rng.uniform(0, n_classes);
      if (c < n_classes) members[static_cast<std::size_t>(c)].push_back(words.back());
    }
    words.push_back("unrelated");
    dp.gold = AnswerClass::from_variants(members[0]);
    for (std::size_t c = 1; c < members.size(); ++c)
      if (!members[c].empty()) dp.variant_classes.push_back(AnswerClass::from_variants(members[c]));
    in.task.datapoints.push_back(dp);

    ResponseRecord x, y;
    x.dp_id = y.dp_id = dp.dp_id;
    x.raw_text = words[static_cast<std::size_t>(rng.uniform(0, vocab))];
    y.raw_text = rng.uniform(0, 1) ? x.raw_text : words[static_cast<std::size_t>(rng.uniform(0, vocab))];
    ra.push_back(x);
    rb.push_back(y);
  }
  in.a = pl::score_records(in.task, ra, "en", pl::ScoringMode::exact);
  in.b = pl::score_records(in.task, rb, "en", pl::ScoringMode::exact);
  return in;
}

constexpr int kInstances = 2000;

Outcome bound_property() {
  SplitMix64 rng(0xB0D);
  Expect expect;
  int tight = 0;
  for (int k = 0; k < kInstances; ++k) {
    const Instance in = random_instance(rng);
    const auto pairs = metrics::pairwise_consistency(in.a, in.b, in.task);
    const auto consistent = static_cast<long>(std::count(pairs.begin(), pairs.end(), true));
    const auto acc_a = metrics::accuracy(in.a), acc_b = metrics::accuracy(in.b);
    const long n = static_cast<long>(pairs.size());
    const long gap = std::labs(static_cast<long>(acc_a.successes) - static_cast<long>(acc_b.successes));
    expect(consistent <= n - gap, "instance " + std::to_string(k) + " counts");
    expect(metrics::consistency(in.a, in.b, in.task) <= metrics::upper_bound(acc_a.value, acc_b.value) + 1e-12,
           "instance " + std::to_string(k) + " fractions");
    tight += consistent == n - gap;
  }
  return expect.done(std::to_string(kInstances) + " instances, " + std::to_string(tight) + " at the bound");
}

Outcome decomposition_identity() {
  SplitMix64 rng(0xDEC0);
  Expect expect;
  double worst = 0;
  for (int k = 0; k < kInstances; ++k) {
    const Instance in = random_instance(rng);
    const auto cc = metrics::conditional_consistency(in.a, in.b, in.task);
    const auto pairs = metrics::pairwise_consistency(in.a, in.b, in.task);
    const auto consistent = static_cast<std::size_t>(std::count(pairs.begin(), pairs.end(), true));
    expect(cc.consistent == consistent, "instance " + std::to_string(k) + " total");
    expect(cc.consistent == cc.consistent_given_correct + cc.consistent_given_incorrect,
           "instance " + std::to_string(k) + " strata counts");
    const double acc = cc.source_accuracy();
    const double recomposed =
        acc * cc.given_correct().value_or(0.0) + (1.0 - acc) * cc.given_incorrect().value_or(0.0);
    worst = std::max(worst, std::abs(recomposed - cc.overall()));
    expect(std::abs(recomposed - cc.overall()) <= 1e-12, "instance " + std::to_string(k) + " fractions");
  }
  std::ostringstream d;
  d << kInstances << " instances, counts exact, max fraction error " << worst;
  return expect.done(d.str());
}

// ---- oracle end-to-end ----------------------------------------------------

// One reply per datapoint. Classification replies carry the gold label's
// words from every sense lexicon, so each lexicon maps them to gold.
std::map<std::string, std::string> oracle_table(const Task& task, const std::vector<std::string>& senses,
                                                Expect& expect) {
  std::map<std::string, std::string> table;
  for (const auto& dp : task.datapoints) {
    if (task.spec.kind == TaskKind::OpenQa) {
      table[dp.dp_id] = dp.gold.members().front();
      continue;
    }
    const std::string label = dp.gold.members().front();
    std::set<std::string> seen;
    std::string reply;
    for (const auto& s : senses)
      for (const auto& token : task.spec.lexicon_for(s).at(label))
        if (seen.insert(token).second) reply += (reply.empty() ? "" : " ") + token;
    for (const auto& s : senses) {
      const auto mapped = matching::map_label(matching::normalize(reply), task.spec.lexicon_for(s));
      expect(mapped == label, task.spec.task_id + " " + dp.dp_id + " maps under " + s);
    }
    table[dp.dp_id] = reply;
  }
  return table;
}

Outcome oracle_end_to_end() {
  Expect expect;
  const auto specs = all_specs();
  const std::vector<std::string> senses = {"en^P", "de^T", "it^T", "nl^T", "sv^T"};
  std::map<std::string, std::size_t> rows_by_condition;

  // fact_oracle: every task, sense and condition.
  for (const auto& id : datasets::known_task_ids()) {
    const fs::path dir = scratch("oracle-" + id);
    pl::Config c;
    c.run_dir = dir / "run";
    c.cache_dir = "-";
    c.tasks = {sample_task(id)};
    c.senses = senses;
    c.conditions = {Condition::full, Condition::I, Condition::X};
    if (id == "paws") {
      c.reference_swap = true;
      c.references["paws"] = kData / "benchmarks" / "paws-references.jsonl";
    }
    std::vector<std::string> lexicon_senses = senses;
    lexicon_senses.push_back("en");
    pl::Pipeline probe(c, offline(), offline());
    const Task task = probe.task(id);
    auto oracle = mc::fact_oracle_model(oracle_table(task, lexicon_senses, expect));
    pl::Pipeline p(c, oracle, testing::synthetic_sense_model(specs));
    for (const auto& row : p.run()) {
      const std::string where = id + "/" + row.sense + "/" + row.condition;
      expect(row.usable, where + " usable");
      expect(row.consistency && row.consistency->value == 1.0, where + " consistency 1");
      expect(row.n > 0, where + " non-empty");
      ++rows_by_condition[row.condition];
    }
  }
  for (const char* cond : {"full", "I", "X", "id-baseline", "reference-swap"})
    expect(rows_by_condition[cond] > 0, std::string("rows for ") + cond);

  // form_tied: brute-forced table agreement per sense.
  const std::map<std::string, double> q = {{"de^T", 0.0}, {"it^T", 0.5}, {"nl^T", 0.7}, {"sv^T", 1.0}};
  pl::Config c;
  const fs::path dir = scratch("form-tied");
  c.run_dir = dir / "run";
  c.cache_dir = "-";
  c.tasks = {pl::TaskConfig{"arithmetics", {}, 100, 17}};
  c.senses = {"de^T", "it^T", "nl^T", "sv^T"};
  pl::Pipeline probe(c, offline(), offline());
  const Task task = probe.task("arithmetics");
  SplitMix64 rng(0x7AB1E);
  std::map<std::string, std::map<std::string, std::string>> tables;
  for (const auto& dp : task.datapoints) {
    const int gold = std::stoi(dp.gold.members().front());
    tables["en"][dp.dp_id] = std::to_string(rng.uniform(0, 3) ? gold : gold + 7);
  }
  std::vector<std::string> ids;
  for (const auto& dp : task.datapoints) ids.push_back(dp.dp_id);
  for (const auto& [sense, share] : q) {
    std::vector<std::string> order = ids;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(i) - 1))]);
    const auto agree = static_cast<std::size_t>(std::lround(share * static_cast<double>(order.size())));
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::string& en = tables["en"][order[i]];
      tables[sense][order[i]] = i < agree ? en : std::to_string(std::stoi(en) + 1 + rng.uniform(0, 4));
    }
  }
  std::map<std::string, double> brute;
  for (const auto& [sense, share] : q) {
    std::size_t equal = 0;
    for (const auto& id : ids) equal += tables[sense][id] == tables["en"][id];
    brute[sense] = static_cast<double>(equal) / static_cast<double>(ids.size());
    expect(brute[sense] == share, sense + " table agreement");
  }
  pl::Pipeline tied(c, mc::form_tied_model(tables), testing::synthetic_sense_model(specs));
  std::ostringstream measured;
  for (const auto& row : tied.run()) {
    if (!q.count(row.sense)) continue;
    const double got = row.consistency ? row.consistency->value : -1.0;
    expect(row.n == ids.size(), row.sense + " complete");
    expect(std::abs(got - brute[row.sense]) <= 1e-12, row.sense + " measured " + std::to_string(got));
    measured << " " << row.sense << "=" << got;
  }
  return expect.done("fact_oracle 1.0 on " + std::to_string(datasets::known_task_ids().size()) +
                     " tasks; form_tied" + measured.str());
}

// ---- ablation plumbing ----------------------------------------------------

// Literal text around each [PLACEHOLDER] of a template.
std::vector<std::string> literals(const std::string& tmpl) {
  std::vector<std::string> out(1);
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] == '[') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && ((tmpl[j] >= 'A' && tmpl[j] <= 'Z') || (tmpl[j] >= '0' && tmpl[j] <= '9') ||
                                 tmpl[j] == '_'))
        ++j;
      if (j < tmpl.size() && tmpl[j] == ']' && j > i + 1) {
        out.emplace_back();
        i = j + 1;
        continue;
      }
    }
    out.back() += tmpl[i++];
  }
  return out;
}

// Splits a prompt into the substituted regions of `lits`; nullopt when the
// prompt's instruction region differs from the template.
std::optional<std::vector<std::string>> regions(const std::string& prompt, const std::vector<std::string>& lits) {
  if (prompt.compare(0, lits[0].size(), lits[0]) != 0) return std::nullopt;
  std::size_t pos = lits[0].size();
  std::vector<std::string> fills;
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (i + 1 == lits.size()) {
      if (prompt.size() < pos + lits[i].size() ||
          prompt.compare(prompt.size() - lits[i].size(), lits[i].size(), lits[i]) != 0)
        return std::nullopt;
      fills.push_back(prompt.substr(pos, prompt.size() - lits[i].size() - pos));
    } else {
      if (lits[i].empty()) return std::nullopt;  // adjacent placeholders are ambiguous
      const auto at = prompt.find(lits[i], pos);
      if (at == std::string::npos) return std::nullopt;
      fills.push_back(prompt.substr(pos, at - pos));
      pos = at + lits[i].size();
    }
  }
  return fills;
}

Outcome ablation_plumbing() {
  Expect expect;
  const auto specs = all_specs();
  std::size_t compared = 0;
  for (const char* id : {"paws", "xnli", "copa", "belebele"}) {
    const fs::path dir = scratch(std::string("ablation-") + id);
    pl::Config c;
    c.run_dir = dir / "run";
    c.cache_dir = "-";
    c.tasks = {sample_task(id)};
    c.senses = {"en^P", "de^T", "sv^T"};
    c.conditions = {Condition::full, Condition::I, Condition::X};
    c.baseline = false;

    std::mutex mutex;
    std::map<std::tuple<std::string, std::string, std::string>, std::string> prompts;
    auto recorder = std::make_shared<mc::FunctionModel>([&](const mc::CompletionRequest& r) {
      std::lock_guard lock(mutex);
      prompts[{r.sense, r.condition, r.dp_id}] = r.prompt;
      return std::string("x");
    });
    pl::Pipeline p(c, recorder, testing::synthetic_sense_model(specs, {true, 0}));
    p.run();
    const Task task = p.task(id);
    const auto base_lits = literals(task.spec.instruction_template);

    for (const std::string sense : {"en^P", "de^T", "sv^T"}) {
      const auto sensed_i = p.load_sense(id, sense, Condition::I);
      expect(sensed_i.has_value(), std::string(id) + " " + sense + " I sense");
      if (!sensed_i) continue;
      const auto i_lits = literals(sensed_i->instruction_text);
      for (const auto& dp : task.datapoints) {
        const std::string where = std::string(id) + "/" + sense + "/" + dp.dp_id;
        const std::string base = datasets::instantiate(task.spec, dp, datasets::base_texts(task.spec, dp));
        const auto base_fills = regions(base, base_lits);
        expect(base_fills.has_value(), where + " base prompt parses");
        const auto pi = prompts.find({sense, "I", dp.dp_id});
        const auto px = prompts.find({sense, "X", dp.dp_id});
        expect(pi != prompts.end() && px != prompts.end(), where + " collected");
        if (!base_fills || pi == prompts.end() || px == prompts.end()) continue;
        ++compared;
        // I: inputs byte-identical, instruction region changed.
        expect(regions(pi->second, i_lits) == base_fills, where + " I keeps inputs");
        expect(i_lits != base_lits && pi->second != base, where + " I changes instruction");
        // X: instruction byte-identical, inputs changed.
        const auto x_fills = regions(px->second, base_lits);
        expect(x_fills.has_value(), where + " X keeps instruction");
        expect(x_fills && *x_fills != *base_fills, where + " X changes inputs");
      }
    }
  }
  return expect.done(std::to_string(compared) + " datapoint prompt pairs per condition");
}

// ---- quality and statistics -----------------------------------------------

Outcome quality_and_statistics() {
  Expect expect;
  const std::vector<std::string> corpus = {"the cat sat on the mat", "a quick brown fox jumps over the dog",
                                           "numbers like 464 stay"};
  const auto same = mtquality::score_corpus(corpus, corpus);
  expect(same.bleu == 100.0, "identical BLEU 100");
  expect(same.rouge1 == 1.0 && same.rouge2 == 1.0 && same.rouge_l == 1.0, "identical ROUGE 1");

  // Hand counts: clipped 1..4-gram matches 10/11, 7/9, 5/7, 3/5; c = 11, r = 13.
  const double hand = 100.0 * std::exp(1.0 - 13.0 / 11.0) *
                      std::pow(10.0 / 11.0 * 7.0 / 9.0 * 5.0 / 7.0 * 3.0 / 5.0, 0.25);
  const double bleu = mtquality::corpus_bleu({"the cat sat on the mat", "a quick brown fox jumps"},
                                             {"the cat sat on the red mat", "the quick brown fox jumps over"});
  expect(std::abs(bleu - hand) <= 1e-6, "two-sentence BLEU " + std::to_string(bleu));
  expect(std::abs(mtquality::rouge_n("a b c", "a b d", 1) - 2.0 / 3.0) <= 1e-12, "ROUGE-1 by hand");
  expect(std::abs(mtquality::rouge_l("c b a", "a b c") - 1.0 / 3.0) <= 1e-12, "ROUGE-L by hand");

  const auto w = metrics::wilson(50, 100);
  expect(std::abs(w.lo - 0.404) <= 5e-4 && std::abs(w.hi - 0.596) <= 5e-4, "Wilson 50/100");

  const auto t = metrics::welch_t_test({1, 2, 3, 4}, {2, 3, 4, 5});
  expect(std::abs(t.t + 1.0954) <= 1e-3, "Welch t " + std::to_string(t.t));
  expect(std::abs(t.p - 0.3153) <= 1e-3, "Welch p " + std::to_string(t.p));

  std::ostringstream d;
  d.precision(10);
  d << "BLEU " << bleu << ", Wilson (" << w.lo << ", " << w.hi << "), Welch t " << t.t << " p " << t.p;
  return expect.done(d.str());
}

// ---- golden report --------------------------------------------------------

Outcome golden_report() {
  const fs::path src = kFixtures / "golden";
  const fs::path dir = scratch("golden");
  fs::copy(src, dir, fs::copy_options::recursive);
  fs::remove_all(dir / "expected");
  pl::Pipeline p(pl::load_config(dir / "config.json"), offline(), offline());
  const auto rows = p.score();
  Expect expect;
  expect(report::json_text(rows) == slurp(src / "expected" / "report.json"), "report.json bytes");
  expect(report::csv_text(rows) == slurp(src / "expected" / "report.csv"), "report.csv bytes");
  return expect.done(std::to_string(rows.size()) + " rows byte-identical");
}

// ---- endpoint smoke -------------------------------------------------------

Outcome endpoint_smoke() {
  std::optional<testing::MockOpenAi> mock;
  pl::Config c;
  c.model.backend = "http";
  std::string where;
  if (const char* url = std::getenv("SENSEPROBE_LIVE_BASE_URL")) {
    c.model.base_url = url;
    if (const char* m = std::getenv("SENSEPROBE_LIVE_MODEL")) c.model.model = m;
    where = "live endpoint " + c.model.base_url;
  } else {
    // Generation prompts are echoed; answers are a number derived from the prompt.
    mock.emplace([](const nlohmann::json& body, int) {
      const std::string prompt = body.at("messages")[0].at("content").get<std::string>();
      if (prompt.rfind("Please translate", 0) == 0 || prompt.rfind("Please paraphrase", 0) == 0)
        return testing::MockOpenAi::Reply{200, prompt.substr(prompt.find('\n') + 1), ""};
      return testing::MockOpenAi::Reply{200, std::to_string(prompt.size() % 997), ""};
    });
    c.model.base_url = mock->base_url();
    c.model.model = "mock";
    c.model.requests_per_second = 1000;
    where = "in-process endpoint";
  }
  const fs::path dir = scratch("smoke");
  c.run_dir = dir / "run";
  c.tasks = {pl::TaskConfig{"arithmetics", {}, 10, 3}};
  c.senses = {"de^T"};
  Expect expect;

  auto client = pl::make_client(c.model);
  pl::Pipeline first(c, client, client);
  const auto rows = first.run();
  expect(rows.size() == 2, "baseline and de^T rows");
  for (const auto& r : rows) expect(r.n == 10 && r.excluded == 0, r.sense + " complete");
  const fs::path reports = c.run_dir / "reports";
  const std::string report_json = slurp(reports / "report.json");
  const fs::path cache = c.run_dir / "cache" / "responses.jsonl";
  expect(fs::exists(cache) && fs::file_size(cache) > 0, "cache written");
  const int calls = mock ? mock->calls() : 0;

  // Resume from the cache alone.
  fs::remove_all(c.run_dir / "responses");
  fs::remove_all(c.run_dir / "senses");
  fs::remove_all(reports);
  pl::Pipeline second(c, pl::make_client(c.model), nullptr);
  second.run();
  if (mock) expect(mock->calls() == calls, "no requests on resume");
  const auto resumed = second.load_run("arithmetics", "de^T", Condition::full);
  expect(resumed && resumed->records.size() == 10, "resumed run complete");
  if (resumed)
    for (const auto& r : resumed->records) expect(r.from_cache, "record " + r.dp_id + " from cache");
  expect(slurp(reports / "report.json") == report_json, "resumed report identical");

  // Well-formed report files.
  try {
    const auto parsed = report::from_json(nlohmann::json::parse(report_json));
    expect(parsed.size() == rows.size(), "report.json round trip");
  } catch (const std::exception& e) {
    expect(false, std::string("report.json parse: ") + e.what());
  }
  std::istringstream csv(slurp(reports / "report.csv"));
  std::string line;
  std::size_t lines = 0, columns = 0;
  bool rectangular = true;
  while (std::getline(csv, line)) {
    const auto k = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (lines++ == 0) columns = k;
    else rectangular = rectangular && k == columns;
  }
  expect(lines == rows.size() + 1 && rectangular, "report.csv shape");
  for (const char* svg : {"accuracy.svg", "consistency.svg"})
    expect(slurp(reports / svg).find("<svg") != std::string::npos, svg);
  return expect.done(where + ", " + std::to_string(calls) + " requests then 0 on resume");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"numerals round trip", numerals_round_trip},
      {"consistency function suite", consistency_suite},
      {"bound property", bound_property},
      {"decomposition identity", decomposition_identity},
      {"oracle end-to-end", oracle_end_to_end},
      {"ablation plumbing", ablation_plumbing},
      {"BLEU/ROUGE/Wilson/Welch", quality_and_statistics},
      {"golden report", golden_report},
      {"endpoint smoke", endpoint_smoke},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.ok;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
