#include "senseprobe/mtquality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "senseprobe/errors.hpp"
#include "senseprobe/unicode.hpp"

namespace senseprobe::mtquality {

namespace {

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::size_t clipped_overlap(const NgramCounts& hyp, const NgramCounts& ref) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : hyp) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

double f1(std::size_t overlap, std::size_t hyp_total, std::size_t ref_total) {
  if (overlap == 0 || hyp_total == 0 || ref_total == 0) return 0;
  const double p = static_cast<double>(overlap) / static_cast<double>(hyp_total);
  const double r = static_cast<double>(overlap) / static_cast<double>(ref_total);
  return 2 * p * r / (p + r);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  const std::u32string cps = unicode::decode(unicode::fold_case(unicode::nfc(text)));
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(unicode::encode(current));
    current.clear();
  };
  for (char32_t c : cps) {
    if (unicode::is_space(c)) {
      flush();
    } else if (unicode::is_punct(c)) {
      flush();
      tokens.push_back(unicode::encode(std::u32string(1, c)));
    } else {
      current += c;
    }
  }
  flush();
  return tokens;
}

double corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size()) throw AlignmentError("bleu: corpora differ in size");
  if (hyps.empty()) throw DegenerateError("bleu: empty corpus");
  constexpr std::size_t kOrder = 4;
  std::size_t matches[kOrder] = {};
  std::size_t totals[kOrder] = {};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto h = tokenize(hyps[s]);
    const auto r = tokenize(refs[s]);
    hyp_len += h.size();
    ref_len += r.size();
    for (std::size_t n = 1; n <= kOrder; ++n) {
      const auto hc = count_ngrams(h, n);
      matches[n - 1] += clipped_overlap(hc, count_ngrams(r, n));
      totals[n - 1] += h.size() >= n ? h.size() - n + 1 : 0;
    }
  }
  double log_sum = 0;
  for (std::size_t n = 0; n < kOrder; ++n) {
    if (matches[n] == 0) return 0;
    log_sum += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
  }
  const double bp = hyp_len < ref_len ? std::exp(1.0 - static_cast<double>(ref_len) /
                                                           static_cast<double>(hyp_len))
                                      : 1.0;
  return 100.0 * bp * std::exp(log_sum / kOrder);
}

double rouge_n(std::string_view hyp, std::string_view ref, int n) {
  if (n != 1 && n != 2) throw RangeError("rouge_n supports n = 1 or 2");
  const auto h = count_ngrams(tokenize(hyp), static_cast<std::size_t>(n));
  const auto r = count_ngrams(tokenize(ref), static_cast<std::size_t>(n));
  auto total = [](const NgramCounts& c) {
    std::size_t t = 0;
    for (const auto& [g, k] : c) t += k;
    return t;
  };
  return f1(clipped_overlap(h, r), total(h), total(r));
}

double rouge_l(std::string_view hyp, std::string_view ref) {
  const auto h = tokenize(hyp);
  const auto r = tokenize(ref);
  std::vector<std::size_t> prev(r.size() + 1, 0), cur(r.size() + 1, 0);
  for (std::size_t i = 1; i <= h.size(); ++i) {
    for (std::size_t j = 1; j <= r.size(); ++j) {
      cur[j] = h[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return f1(prev[r.size()], h.size(), r.size());
}

CorpusScores score_corpus(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  CorpusScores s;
  s.bleu = corpus_bleu(hyps, refs);
  s.segments = hyps.size();
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    s.rouge1 += rouge_n(hyps[i], refs[i], 1);
    s.rouge2 += rouge_n(hyps[i], refs[i], 2);
    s.rouge_l += rouge_l(hyps[i], refs[i]);
  }
  const double n = static_cast<double>(hyps.size());
  s.rouge1 /= n;
  s.rouge2 /= n;
  s.rouge_l /= n;
  return s;
}

void write_bridge_input(const std::filesystem::path& path, const std::vector<BridgeRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : records) {
    const nlohmann::json j = {{"dp_id", r.dp_id}, {"src", r.src}, {"mt", r.mt}, {"ref", r.ref}};
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

NeuralScores import_neural_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  NeuralScores out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw LoadError("invalid JSON", n);
    }
    if (!j.is_object()) throw LoadError("expected a JSON object", n);
    if (!j.contains("dp_id") || !j["dp_id"].is_string()) throw LoadError("missing string dp_id", n);
    if (!j.contains("score") || !j["score"].is_number()) throw LoadError("missing numeric score", n);
    const auto dp_id = j["dp_id"].get<std::string>();
    const double score = j["score"].get<double>();
    if (!std::isfinite(score)) throw LoadError("score is not finite", n);
    if (!out.scores.emplace(dp_id, score).second) throw LoadError("duplicate dp_id " + dp_id, n);
    if (score < 0 || score > 1) {
      out.warnings.push_back("line " + std::to_string(n) + ": score " + std::to_string(score) +
                             " for " + dp_id + " is outside [0, 1]");
    }
  }
  return out;
}

}  // namespace senseprobe::mtquality
