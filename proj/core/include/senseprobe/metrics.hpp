#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "senseprobe/language.hpp"
#include "senseprobe/matching.hpp"
#include "senseprobe/records.hpp"
#include "senseprobe/task.hpp"

namespace senseprobe::metrics {

/// Per-datapoint outcome of one run after scoring.
struct ScoredItem {
  std::string dp_id;
  bool correct = false;
  matching::NormalizedText response;
  std::optional<std::string> label;  // classification only; nullopt = UNMAPPED
  std::string request_hash;
};

/// Items are unique and sorted by dp_id.
struct ScoredRun {
  RunManifest manifest;
  TaskKind kind = TaskKind::OpenQa;
  std::vector<ScoredItem> items;
};

/// Throws AlignmentError on duplicate dp_ids; sorts items.
void sort_items(ScoredRun& run);

struct Proportion {
  double value = 0;
  double lo = 0;
  double hi = 0;
  std::size_t successes = 0;
  std::size_t n = 0;
};

/// Wilson score interval; n = 0 throws DegenerateError.
Proportion wilson(std::size_t successes, std::size_t n, double confidence = 0.95);

Proportion accuracy(const ScoredRun& run);

/// Fraction of classification items whose reply mapped to no label.
double unmapped_rate(const ScoredRun& run);

/// f(r_i, r_i*) for every aligned pair, in dp_id order. Open QA uses the
/// datapoint's answer classes from `task`; classification compares labels.
/// Throws AlignmentError unless both runs cover the same dp_ids.
std::vector<bool> pairwise_consistency(const ScoredRun& a, const ScoredRun& b, const Task& task);

double consistency(const ScoredRun& a, const ScoredRun& b, const Task& task);

/// 1 - |acc_a - acc_b|.
double upper_bound(double acc_a, double acc_b);

/// Consistency split by correctness of the English source run. The counts
/// satisfy consistent = consistent_given_correct + consistent_given_incorrect.
struct Conditional {
  std::size_t n = 0;
  std::size_t n_correct = 0;
  std::size_t consistent = 0;
  std::size_t consistent_given_correct = 0;
  std::size_t consistent_given_incorrect = 0;

  double overall() const;
  std::optional<double> given_correct() const;    // nullopt: empty stratum
  std::optional<double> given_incorrect() const;  // nullopt: empty stratum
  double source_accuracy() const;
};

Conditional conditional_consistency(const ScoredRun& source_en, const ScoredRun& alt,
                                    const Task& task);

/// Product-moment correlation. Throws DegenerateError for fewer than two
/// points or zero variance, AlignmentError for unequal lengths.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct TTest {
  double t = 0;
  double p = 1;   // two-sided, in (0, 1]
  double df = 0;  // Welch-Satterthwaite
};

/// Welch's unequal-variance t-test. Two constant samples with equal means
/// give t = 0, p = 1; with different means the statistic is undefined and
/// DegenerateError is thrown, as it is for samples of fewer than two values.
TTest welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// acc[prompt language][subset tag], 5 x 5.
using AccuracyMatrix = std::map<Language, std::map<Language, double>>;

struct MatchedLanguage {
  AccuracyMatrix deviation;       // acc minus the column mean over prompt languages
  std::vector<double> matched;     // diagonal, in language order
  std::vector<double> mismatched;  // off-diagonal, row-major
  std::optional<TTest> test;       // nullopt when the statistic is undefined
};

/// Throws ConfigError when a cell is missing.
MatchedLanguage matched_language_analysis(const AccuracyMatrix& acc);

struct PairOutcome {
  std::string dp_id;
  bool consistent = false;
};

struct QualityFilter {
  std::vector<PairOutcome> kept;
  std::size_t dropped = 0;
  std::size_t unscored = 0;  // pairs without a quality score (dropped as well)
  std::optional<double> consistency_all;
  std::optional<double> consistency_kept;
  std::optional<double> delta;  // kept minus all
};

/// Keeps pairs whose score is strictly greater than `threshold`.
QualityFilter filter_by_quality(const std::vector<PairOutcome>& pairs,
                                const std::map<std::string, double>& scores, double threshold);

}  // namespace senseprobe::metrics
