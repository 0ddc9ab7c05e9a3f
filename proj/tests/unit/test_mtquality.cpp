#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "senseprobe/errors.hpp"
#include "senseprobe/mtquality.hpp"

using namespace senseprobe;
using namespace senseprobe::mtquality;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "senseprobe-unit-mtquality";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace

TEST_SUITE("mtquality") {

TEST_CASE("tokenization") {
  CHECK(tokenize("The cat, sat.") == std::vector<std::string>{"the", "cat", ",", "sat", "."});
  CHECK(tokenize("  ") .empty());
  // NFD input composes before splitting.
  CHECK(tokenize("Cre\xCC\x81tier") == std::vector<std::string>{"crétier"});
}

TEST_CASE("identical corpora score perfectly") {
  const std::vector<std::string> c = {"the quick brown fox jumps over the dog", "a b c d e"};
  CHECK(corpus_bleu(c, c) == 100.0);
  CHECK(rouge_n(c[0], c[0], 1) == 1.0);
  CHECK(rouge_n(c[0], c[0], 2) == 1.0);
  CHECK(rouge_l(c[0], c[0]) == 1.0);
  const auto s = score_corpus(c, c);
  CHECK(s.bleu == 100.0);
  CHECK(s.rouge1 == 1.0);
  CHECK(s.rouge_l == 1.0);
  CHECK(s.segments == 2);
}

TEST_CASE("two-sentence BLEU fixture") {
  // Clipped matches 1-4: 10/11, 7/9, 5/7, 3/5; c = 11, r = 13.
  // exp(1 - 13/11) * (10/11 * 7/9 * 5/7 * 3/5)^(1/4) * 100.
  const double bleu = corpus_bleu({"the cat sat on the mat", "a quick brown fox jumps"},
                                  {"the cat sat on the red mat", "the quick brown fox jumps over"});
  CHECK(bleu == doctest::Approx(61.859852760686344).epsilon(1e-9));
}

TEST_CASE("ROUGE by hand") {
  CHECK(rouge_n("a b c", "a b d", 1) == doctest::Approx(2.0 / 3.0));
  CHECK(rouge_n("a b c", "a b d", 2) == doctest::Approx(0.5));
  CHECK(rouge_l("c b a", "a b c") == doctest::Approx(1.0 / 3.0));
  CHECK(rouge_n("x", "y", 1) == 0.0);
}

TEST_CASE("BLEU errors and zero overlap") {
  CHECK_THROWS_AS(corpus_bleu({}, {}), DegenerateError);
  CHECK_THROWS_AS(corpus_bleu({"a"}, {"a", "b"}), AlignmentError);
  CHECK(corpus_bleu({"x y z w"}, {"a b c d"}) == 0.0);
}

TEST_CASE("bridge files") {
  const fs::path in = scratch("bridge.jsonl");
  write_bridge_input(in, {{"2", "Hallo", "Hello", "Hello"}, {"1", "Welt", "World", "Earth"}});
  std::ifstream f(in);
  std::string first;
  std::getline(f, first);
  CHECK(first == R"({"dp_id":"2","mt":"Hello","ref":"Hello","src":"Hallo"})");

  const fs::path out = scratch("scores.jsonl");
  write(out, "{\"dp_id\":\"2\",\"score\":0.93}\n\n{\"dp_id\":\"1\",\"score\":1.2}\n");
  const auto ns = import_neural_scores(out);
  CHECK(ns.scores.at("2") == 0.93);
  CHECK(ns.scores.at("1") == 1.2);
  CHECK(ns.warnings.size() == 1);

  write(out, "{\"dp_id\":\"2\",\"score\":0.5}\n{\"dp_id\":\"2\",\"score\":0.6}\n");
  try {
    import_neural_scores(out);
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.line() == 2);
  }
  write(out, "{\"dp_id\":\"2\"}\n");
  CHECK_THROWS_AS(import_neural_scores(out), LoadError);
  write(out, "not json\n");
  CHECK_THROWS_AS(import_neural_scores(out), LoadError);
}

}
