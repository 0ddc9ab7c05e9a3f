#include "senseprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "senseprobe/errors.hpp"

namespace senseprobe::metrics {

void sort_items(ScoredRun& run) {
  std::sort(run.items.begin(), run.items.end(),
            [](const ScoredItem& a, const ScoredItem& b) { return a.dp_id < b.dp_id; });
  for (std::size_t i = 1; i < run.items.size(); ++i) {
    if (run.items[i].dp_id == run.items[i - 1].dp_id) {
      throw AlignmentError("duplicate dp_id " + run.items[i].dp_id);
    }
  }
}

Proportion wilson(std::size_t successes, std::size_t n, double confidence) {
  if (n == 0) throw DegenerateError("proportion of an empty sample");
  if (successes > n) throw RangeError("more successes than trials");
  const double z =
      boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + confidence / 2);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double center = (p + z2 / (2 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return {p, std::max(0.0, center - half), std::min(1.0, center + half), successes, n};
}

Proportion accuracy(const ScoredRun& run) {
  const auto hits = static_cast<std::size_t>(
      std::count_if(run.items.begin(), run.items.end(), [](const ScoredItem& i) { return i.correct; }));
  return wilson(hits, run.items.size());
}

double unmapped_rate(const ScoredRun& run) {
  if (run.kind != TaskKind::Classification || run.items.empty()) return 0;
  const auto misses = std::count_if(run.items.begin(), run.items.end(),
                                    [](const ScoredItem& i) { return !i.label.has_value(); });
  return static_cast<double>(misses) / static_cast<double>(run.items.size());
}

std::vector<bool> pairwise_consistency(const ScoredRun& a, const ScoredRun& b, const Task& task) {
  if (a.items.size() != b.items.size()) {
    throw AlignmentError("runs cover " + std::to_string(a.items.size()) + " and " +
                         std::to_string(b.items.size()) + " datapoints");
  }
  std::vector<bool> out;
  out.reserve(a.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const auto& x = a.items[i];
    const auto& y = b.items[i];
    if (x.dp_id != y.dp_id) throw AlignmentError("misaligned dp_ids " + x.dp_id + " / " + y.dp_id);
    if (a.kind == TaskKind::Classification) {
      out.push_back(matching::labels_consistent(x.label, y.label));
      continue;
    }
    const Datapoint* dp = task.find(x.dp_id);
    if (!dp) throw AlignmentError("dp_id " + x.dp_id + " not in task " + task.spec.task_id);
    out.push_back(matching::consistent(x.response, y.response, dp->all_classes()));
  }
  return out;
}

double consistency(const ScoredRun& a, const ScoredRun& b, const Task& task) {
  const auto flags = pairwise_consistency(a, b, task);
  if (flags.empty()) throw DegenerateError("consistency over zero pairs");
  return static_cast<double>(std::count(flags.begin(), flags.end(), true)) /
         static_cast<double>(flags.size());
}

double upper_bound(double acc_a, double acc_b) { return 1.0 - std::fabs(acc_a - acc_b); }

double Conditional::overall() const {
  if (n == 0) throw DegenerateError("consistency over zero pairs");
  return static_cast<double>(consistent) / static_cast<double>(n);
}

std::optional<double> Conditional::given_correct() const {
  if (n_correct == 0) return std::nullopt;
  return static_cast<double>(consistent_given_correct) / static_cast<double>(n_correct);
}

std::optional<double> Conditional::given_incorrect() const {
  if (n == n_correct) return std::nullopt;
  return static_cast<double>(consistent_given_incorrect) / static_cast<double>(n - n_correct);
}

double Conditional::source_accuracy() const {
  if (n == 0) throw DegenerateError("accuracy over zero items");
  return static_cast<double>(n_correct) / static_cast<double>(n);
}

Conditional conditional_consistency(const ScoredRun& source_en, const ScoredRun& alt,
                                    const Task& task) {
  const auto flags = pairwise_consistency(source_en, alt, task);
  Conditional c;
  c.n = flags.size();
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const bool correct = source_en.items[i].correct;
    c.n_correct += correct;
    if (!flags[i]) continue;
    ++c.consistent;
    ++(correct ? c.consistent_given_correct : c.consistent_given_incorrect);
  }
  return c;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw AlignmentError("pearson: samples differ in length");
  if (xs.size() < 2) throw DegenerateError("pearson needs at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw DegenerateError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

struct Moments {
  double mean;
  double var;  // unbiased
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1)};
}

}  // namespace

TTest welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw DegenerateError("t-test needs two values per sample");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = ma.var / na;
  const double vb = mb.var / nb;
  const double se2 = va + vb;
  if (se2 == 0) {
    if (ma.mean == mb.mean) return {0.0, 1.0, na + nb - 2};
    throw DegenerateError("t-test: both samples constant with different means");
  }
  const double t = (ma.mean - mb.mean) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na - 1) + vb * vb / (nb - 1));
  const boost::math::students_t_distribution<double> dist(df);
  double p = 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  p = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
  return {t, p, df};
}

MatchedLanguage matched_language_analysis(const AccuracyMatrix& acc) {
  auto cell = [&](Language row, Language col) {
    auto r = acc.find(row);
    if (r == acc.end()) throw ConfigError("missing row " + std::string(to_code(row)));
    auto c = r->second.find(col);
    if (c == r->second.end()) {
      throw ConfigError("missing cell " + std::string(to_code(row)) + "/" + std::string(to_code(col)));
    }
    return c->second;
  };
  MatchedLanguage out;
  for (Language col : kAllLanguages) {
    double mean = 0;
    for (Language row : kAllLanguages) mean += cell(row, col);
    mean /= static_cast<double>(kAllLanguages.size());
    for (Language row : kAllLanguages) out.deviation[row][col] = cell(row, col) - mean;
  }
  for (Language row : kAllLanguages) {
    for (Language col : kAllLanguages) {
      (row == col ? out.matched : out.mismatched).push_back(out.deviation[row][col]);
    }
  }
  try {
    out.test = welch_t_test(out.matched, out.mismatched);
  } catch (const DegenerateError&) {
    out.test.reset();
  }
  return out;
}

QualityFilter filter_by_quality(const std::vector<PairOutcome>& pairs,
                                const std::map<std::string, double>& scores, double threshold) {
  QualityFilter out;
  std::size_t consistent_all = 0;
  std::size_t consistent_kept = 0;
  for (const auto& pair : pairs) {
    consistent_all += pair.consistent;
    auto it = scores.find(pair.dp_id);
    if (it == scores.end()) {
      ++out.unscored;
      ++out.dropped;
    } else if (it->second > threshold) {
      consistent_kept += pair.consistent;
      out.kept.push_back(pair);
    } else {
      ++out.dropped;
    }
  }
  if (!pairs.empty()) {
    out.consistency_all = static_cast<double>(consistent_all) / static_cast<double>(pairs.size());
  }
  if (!out.kept.empty()) {
    out.consistency_kept =
        static_cast<double>(consistent_kept) / static_cast<double>(out.kept.size());
  }
  if (out.consistency_all && out.consistency_kept) {
    out.delta = *out.consistency_kept - *out.consistency_all;
  }
  return out;
}

}  // namespace senseprobe::metrics
