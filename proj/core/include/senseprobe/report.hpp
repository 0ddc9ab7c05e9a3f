#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "senseprobe/metrics.hpp"
#include "senseprobe/mtquality.hpp"

namespace senseprobe::report {

/// One task x sense x condition line of the report. Missing values are
/// undefined (null in JSON, NA in CSV), never zero.
struct Row {
  std::string task_id;
  std::string sense;
  std::string condition;
  std::size_t n = 0;         // aligned pairs
  std::size_t excluded = 0;  // datapoints dropped by sense-generation or transport failures

  std::optional<metrics::Proportion> acc_source;  // English run (first baseline run for "id")
  std::optional<metrics::Proportion> acc_sense;
  std::optional<metrics::Proportion> consistency;
  std::optional<double> upper_bound;
  std::optional<double> id_baseline;
  std::optional<double> given_correct;
  std::optional<double> given_incorrect;
  std::optional<double> unmapped_source;  // classification only
  std::optional<double> unmapped_sense;

  std::optional<double> acc_source_containment;
  std::optional<double> acc_sense_containment;
  std::optional<double> acc_source_extracted;
  std::optional<double> acc_sense_extracted;
  std::optional<double> consistency_extracted;

  std::optional<double> number_translation_accuracy;
  std::optional<mtquality::CorpusScores> quality;
  std::optional<double> neural_mean;
  std::optional<double> filtered_consistency;
  std::optional<std::size_t> filtered_n;
  std::optional<double> filtered_delta;

  bool usable = true;
  std::string note;
};

/// Rounds to six decimals; the report's only number format.
double round6(double x);

/// Orders rows by task, then sense (id, en, en^P, de^T, it^T, nl^T, sv^T),
/// then condition (full, I, X, reference-swap, id-baseline).
void sort_rows(std::vector<Row>& rows);

/// Array of row objects with sorted keys and rounded numbers.
nlohmann::json to_json(const std::vector<Row>& rows);
std::vector<Row> from_json(const nlohmann::json& j);

/// Compact canonical text of `to_json`, newline-terminated.
std::string json_text(const std::vector<Row>& rows);

/// Header plus one line per row; six fixed decimals, NA for undefined.
std::string csv_text(const std::vector<Row>& rows);

/// Accuracy per task and sense (full condition) with 95% CI whiskers.
std::string accuracy_svg(const std::vector<Row>& rows);

/// Consistency bars with CI whiskers, grouped by task; every bar except the
/// id baseline carries an upper-bound tick (class "upper-bound").
std::string consistency_svg(const std::vector<Row>& rows);

enum class Format { json, csv, svg };

/// Writes report.json, report.csv and accuracy.svg/consistency.svg into
/// `dir` for the requested formats. Throws Error when a file cannot be written.
void emit(const std::vector<Row>& rows, const std::filesystem::path& dir,
          const std::vector<Format>& formats);

}  // namespace senseprobe::report
