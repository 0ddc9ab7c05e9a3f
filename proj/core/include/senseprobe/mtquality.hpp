#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace senseprobe::mtquality {

/// NFC, simple case fold, every punctuation code point a token of its own,
/// then whitespace split.
std::vector<std::string> tokenize(std::string_view text);

/// Corpus BLEU-4 in [0, 100]: clipped n-gram counts summed over the corpus,
/// uniform weights, brevity penalty exp(1 - r/c) when c < r, no smoothing.
/// Throws DegenerateError for an empty corpus, AlignmentError for unequal sizes.
double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);

/// ROUGE-N F1 for n in {1, 2}; 0 when there is no overlap.
double rouge_n(std::string_view hyp, std::string_view ref, int n);

/// ROUGE-L F1 from the longest common token subsequence.
double rouge_l(std::string_view hyp, std::string_view ref);

/// Corpus means of the per-segment ROUGE scores plus corpus BLEU.
struct CorpusScores {
  double bleu = 0;
  double rouge1 = 0;
  double rouge2 = 0;
  double rouge_l = 0;
  std::size_t segments = 0;
};

CorpusScores score_corpus(const std::vector<std::string>& hyps, const std::vector<std::string>& refs);

/// One line of the bridge input: the source, the model translation and the
/// ground-truth translation.
struct BridgeRecord {
  std::string dp_id;
  std::string src;
  std::string mt;
  std::string ref;
};

/// Writes {"dp_id","src","mt","ref"} per line, in the given order.
void write_bridge_input(const std::filesystem::path& path, const std::vector<BridgeRecord>& records);

struct NeuralScores {
  std::map<std::string, double> scores;  // dp_id -> score
  std::vector<std::string> warnings;     // out-of-range scores, kept
};

/// Reads the bridge output ({"dp_id", "score", ...} per line). Malformed
/// lines and duplicate dp_ids throw LoadError carrying the line number.
NeuralScores import_neural_scores(const std::filesystem::path& path);

}  // namespace senseprobe::mtquality
