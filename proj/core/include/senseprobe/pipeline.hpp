#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "senseprobe/metrics.hpp"
#include "senseprobe/modelclient.hpp"
#include "senseprobe/records.hpp"
#include "senseprobe/report.hpp"
#include "senseprobe/sensegen.hpp"
#include "senseprobe/task.hpp"

namespace senseprobe::pipeline {

/// Model endpoint or synthetic backend.
///   http       OpenAI-compatible endpoint at base_url
///   echo       replies with the text a generation prompt asks to transform
///   oracle     dp_id -> answer table (JSON object at `table`)
///   form-tied  sense -> dp_id -> answer tables (JSON object at `table`)
///   scripted   {"replies": {prompt: reply}, "default": reply} at `table`
///   random     uniform over `labels`, seeded by `seed`
struct ModelConfig {
  std::string backend = "http";
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  double temperature = modelclient::kDefaultTemperature;
  int max_tokens = modelclient::kDefaultMaxTokens;
  std::size_t max_concurrency = 4;
  double requests_per_second = 1.0;
  int retries = modelclient::kDefaultRetries;
  std::filesystem::path table;
  std::vector<std::string> labels;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

/// One task to evaluate. Fact CSVs and benchmark files are read from `path`;
/// arithmetics uses count/seed; `limit` caps benchmark rows (0 = all).
struct TaskConfig {
  std::string id;
  std::filesystem::path path;
  int count = 500;
  std::uint64_t seed = 0;
  std::size_t limit = 0;
  std::string split = "test";

  nlohmann::json to_json() const;
  static TaskConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

struct ScoringConfig {
  bool containment = false;
  bool extract_numeric = false;
  double quality_threshold = 0.8;
};

struct Config {
  std::filesystem::path run_dir = "run";
  std::filesystem::path cache_dir;  // empty: <run_dir>/cache; "-" disables caching
  ModelConfig model;
  std::optional<ModelConfig> sense_model;  // defaults to `model`
  std::vector<TaskConfig> tasks;
  std::vector<std::string> senses = {"en^P", "de^T", "it^T", "nl^T", "sv^T"};
  std::vector<Condition> conditions = {Condition::full};
  bool baseline = true;
  bool reference_swap = false;
  ScoringConfig scoring;
  std::map<std::string, std::filesystem::path> references;     // task id -> references JSONL
  std::map<std::string, std::filesystem::path> neural_scores;  // "task/sense" -> bridge output
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  /// Relative paths are resolved against `base_dir`.
  static Config from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
};

Config load_config(const std::filesystem::path& path);

std::shared_ptr<modelclient::Client> make_client(const ModelConfig& config);

/// Parallel reference inputs, one JSONL line per (dp_id, lang):
///   {"dp_id": "...", "lang": "de", "components": {"sentence1": "...", ...}}
using References = std::map<std::pair<std::string, Language>, std::map<std::string, std::string>>;
References load_references(const std::filesystem::path& path);

struct CollectedRun {
  RunManifest manifest;
  std::vector<ResponseRecord> records;           // sorted by dp_id
  std::map<std::string, std::string> failures;  // dp_id -> error
  std::size_t skipped = 0;                       // no sensed text or no reference
};

enum class ScoringMode { exact, containment, extract_numeric };

/// Scores records against the task. Classification replies are mapped with
/// the lexicon of `lexicon_sense`. Records of excluded datapoints are skipped.
metrics::ScoredRun score_records(const Task& task, const std::vector<ResponseRecord>& records,
                                 const std::string& lexicon_sense, ScoringMode mode);

/// Restricts both runs to their common dp_ids.
void align(metrics::ScoredRun& a, metrics::ScoredRun& b);

class Pipeline {
 public:
  /// Clients are wrapped in the response cache unless caching is disabled.
  Pipeline(Config config, std::shared_ptr<modelclient::Client> answer_client,
           std::shared_ptr<modelclient::Client> sense_client);

  const Config& config() const noexcept { return config_; }

  /// Builds or loads every configured task and snapshots it under tasks/.
  void generate_data();
  /// The snapshot of a configured task, built first when missing.
  Task task(const std::string& task_id);

  /// Generates (or reloads) one sense and persists it under senses/.
  sensegen::SensedTask make_sense(const Task& task, const std::string& sense, Condition condition);
  std::optional<sensegen::SensedTask> load_sense(const std::string& task_id, const std::string& sense,
                                                 Condition condition) const;
  void make_senses();

  /// Collects and persists one run. Identity senses use the base texts;
  /// reference-swap pairs the full-condition instruction with reference inputs.
  CollectedRun collect(const Task& task, const std::string& sense, Condition condition,
                       const std::optional<std::string>& run_tag = std::nullopt);
  void collect_all();

  /// Two nonce-separated English runs and their consistency.
  double run_id_baseline(const Task& task);

  /// Conditions I and X for benchmark tasks, plus reference-swap when enabled.
  void ablate();

  std::optional<CollectedRun> load_run(const std::string& task_id, const std::string& sense,
                                       Condition condition,
                                       const std::optional<std::string>& run_tag = std::nullopt) const;

  /// Report rows computed from the persisted artifacts only.
  std::vector<report::Row> score();

  /// generate_data, make_senses, collect_all, ablate, score, emit.
  std::vector<report::Row> run();

  nlohmann::json analyze_conditional();
  nlohmann::json analyze_matched_language();
  nlohmann::json analyze_correlation();
  /// BLEU/ROUGE against references; writes bridge input files under
  /// reports/bridge/ when `write_bridge` is set.
  nlohmann::json analyze_quality(bool write_bridge);

  std::filesystem::path reports_dir() const { return config_.run_dir / "reports"; }

 private:
  const TaskConfig& task_config(const std::string& task_id) const;
  std::vector<std::string> senses_for(const Task& task) const;
  std::vector<Condition> conditions_for(const Task& task) const;
  void record_manifest(const std::string& section, const std::string& key, const nlohmann::json& value);
  std::optional<report::Row> compare(const Task& task, const std::string& sense, Condition condition,
                                     const std::optional<double>& baseline);
  std::optional<References> references_for(const std::string& task_id);

  Config config_;
  std::shared_ptr<modelclient::ResponseCache> cache_;
  std::shared_ptr<modelclient::Client> answer_;
  std::shared_ptr<modelclient::Client> sense_;
  std::map<std::string, Task> tasks_;
  std::map<std::string, References> references_;
};

/// Applies --base-url/--model/... style overrides on top of a config.
struct Overrides {
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::optional<std::size_t> max_concurrency;
  std::optional<std::filesystem::path> cache_dir;
};
void apply(Config& config, const Overrides& overrides);

}  // namespace senseprobe::pipeline
