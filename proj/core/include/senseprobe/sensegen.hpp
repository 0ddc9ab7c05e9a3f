#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "senseprobe/datasets.hpp"
#include "senseprobe/language.hpp"
#include "senseprobe/modelclient.hpp"
#include "senseprobe/records.hpp"
#include "senseprobe/task.hpp"

namespace senseprobe::sensegen {

enum class Method { identity, paraphrase, translation };

/// A presentational form: "id" and "en" are identities, "en^P" the English
/// paraphrase, "<lang>^T" a translation.
struct SenseSpec {
  std::string label;
  Method method = Method::identity;
  Language target = Language::en;

  /// Throws ConfigError for labels outside id, en, en^P, de^T, it^T, nl^T, sv^T.
  static SenseSpec parse(std::string_view label);
};

/// "Please translate the following text into German:\n<text>". Belebele input
/// gets "without answering the question" before the colon. lang = en throws
/// ConfigError.
std::string translation_prompt(std::string_view text, Language lang,
                               std::optional<BenchmarkKind> benchmark_input = std::nullopt);

/// The generic paraphrase prompt, or the benchmark-specific one when
/// `benchmark_input` names the benchmark whose input data is paraphrased.
std::string paraphrase_prompt(std::string_view text,
                              std::optional<BenchmarkKind> benchmark_input = std::nullopt);

/// All components of one datapoint as "Display: text" lines, in spec order.
std::string compose_components(const TaskSpec& spec, const Datapoint& dp);

/// Splits a generation reply back into one text per label, in order.
///   1. sections opened by the given labels at line starts (case-insensitive);
///   2. otherwise any short "Label:" line prefixes, when there are exactly
///      as many as labels;
///   3. otherwise non-empty lines, when there are exactly as many as labels.
/// Surrounding whitespace and quotes are removed. nullopt when all fail.
std::optional<std::vector<std::string>> split_components(std::string_view reply,
                                                         const std::vector<std::string>& labels);

struct GenerationOptions {
  std::string model_id;
  double temperature = modelclient::kDefaultTemperature;
  int max_tokens = modelclient::kDefaultMaxTokens;
  std::size_t max_concurrency = 4;
};

struct SensedEntry {
  std::string dp_id;
  std::map<std::string, std::string> components;
  std::optional<std::string> failure;
  std::optional<bool> numbers_valid;  // arithmetics translations only
};

struct GenerationManifest {
  std::string model_id;
  double temperature = modelclient::kDefaultTemperature;
  int max_tokens = modelclient::kDefaultMaxTokens;
  std::string instruction_hash;                     // empty when the instruction was not generated
  std::map<std::string, std::string> input_hashes;  // dp_id -> request hash(es), '+'-joined
};

struct SensedTask {
  std::string base_task_id;
  SenseSpec sense;
  Condition condition = Condition::full;
  std::string instruction_text;
  std::vector<SensedEntry> entries;  // sorted by dp_id
  GenerationManifest manifest;
  bool usable = true;
  std::string note;

  std::size_t failures() const;
  const SensedEntry* find(std::string_view dp_id) const;
  nlohmann::json to_json() const;
  static SensedTask from_json(const nlohmann::json& j);
};

/// Instruction and component texts of one datapoint in this sense.
datasets::SenseTexts texts_for(const SensedTask& sensed, const SensedEntry& entry);

struct NumberTranslationItem {
  std::string dp_id;
  std::pair<std::string, std::string> translated;
  bool valid = false;
  std::string diagnostic;
  std::string request_hashes;  // both requests, '+'-joined
};

struct NumberTranslation {
  std::vector<NumberTranslationItem> items;
  double validity = 0;  // fraction of items with both numbers correct
};

/// Translates number1/number2 of every datapoint one number per request and
/// checks each pair with numerals::check_number_translation.
NumberTranslation translate_arithmetics_numbers(const std::vector<const Datapoint*>& datapoints,
                                                Language lang, modelclient::Client& client,
                                                const GenerationOptions& options,
                                                std::string_view sense_label);

/// Generates `sense` for `task` under `condition` (full, I or X).
/// The instruction is regenerated for full and I, the input components for
/// full and X. Fixed components are copied, with olympics values localized
/// for translations. Datapoints whose reply cannot be split are recorded as
/// failures. A regenerated instruction that changes the placeholder set
/// throws PlaceholderError; transport errors propagate.
SensedTask generate_sense(const Task& task, const SenseSpec& sense, modelclient::Client& client,
                          Condition condition, const GenerationOptions& options);

/// Fraction of failed datapoints above which a paraphrase sense is unusable.
inline constexpr double kMaxFailureRate = 0.2;

}  // namespace senseprobe::sensegen
