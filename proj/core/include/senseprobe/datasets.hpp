#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "senseprobe/language.hpp"
#include "senseprobe/task.hpp"

namespace senseprobe::datasets {

/// Task ids with a built-in spec: the five fact families (elements and
/// olympics count twice) plus the four benchmarks.
const std::vector<std::string>& known_task_ids();

/// Spec for a known task id, with the shipped English instruction and the
/// label lexicons. Throws ConfigError for unknown ids.
TaskSpec make_spec(std::string_view task_id);

/// Shipped instruction text for (task, sense label); "id" resolves to "en".
std::optional<std::string> shipped_instruction(std::string_view task_id,
                                               std::string_view sense_label);

/// `count` sums of two summands drawn uniformly from [1, 1000] with
/// SplitMix64(seed). Fields hold English number words; gold is the sum.
Task build_arithmetics(std::uint64_t seed, int count);

/// Datapoint for a fixed pair of summands, e.g. (375, 23) -> gold "398".
Datapoint arithmetics_datapoint(std::string dp_id, int a, int b);

enum class ElementsSubtask { FromElement, FromPosition };

/// Elements 1-118 without the f-block (La-Yb, Ac-No): 90 datapoints keyed by
/// zero-padded atomic number.
Task build_elements(ElementsSubtask subtask);

/// Facts CSV (UTF-8, header row):
///   dp_id, <one column per component>, gold, variant*, [subset_tag], [exclude], ...
/// `gold` and every `variant*` column hold pipe-separated class members;
/// an empty variant cell means no class. `exclude` is 1/true/yes to keep the
/// row out of scoring. Other columns land in Datapoint::metadata.
Task load_facts_csv(const std::filesystem::path& path, std::string_view task_id);

/// Reads a benchmark test file in its distributed format:
///   paws      TSV  id, sentence1, sentence2, label (1 = paraphrase)
///   xnli      TSV  XNLI-1.0 layout; English rows only
///   copa      JSONL premise, choice1, choice2, question, label, idx
///   belebele  JSONL flores_passage, question, mc_answer1..4, correct_answer_num
/// `limit` > 0 keeps the first `limit` rows.
Task load_benchmark(BenchmarkKind kind, const std::filesystem::path& path, std::size_t limit = 0);

/// Placeholder names in order of first occurrence ("[NUMBER1]" -> "NUMBER1").
std::vector<std::string> placeholders(std::string_view text);

/// Instruction and component texts of one datapoint in one sense.
struct SenseTexts {
  std::string instruction;
  std::map<std::string, std::string> components;  // component name -> text
};

/// Base-sense texts: the task's English instruction and the datapoint's fields.
SenseTexts base_texts(const TaskSpec& spec, const Datapoint& dp);

/// Substitutes every [NAME] in `texts.instruction`, first from the component
/// texts, then from the datapoint's fields. Single pass; substituted text is
/// never rescanned. Throws PlaceholderError naming the first unresolved one.
std::string instantiate(const TaskSpec& spec, const Datapoint& dp, const SenseTexts& texts);

/// Translation of a fixed olympics field value ("gold", "men's") into `lang`,
/// or nullopt when the value is not in the table.
std::optional<std::string> localize_field(std::string_view field, std::string_view value,
                                          Language lang);

/// Datapoints of a task as JSON ({"task_id", "datapoints": [...]}); the spec
/// is rebuilt from the task id on reading.
nlohmann::json task_to_json(const Task& task);
Task task_from_json(const nlohmann::json& j);

/// Throws ConfigError unless the datapoints split into exactly five equally
/// sized subset_tag groups, one per language.
void check_subset_balance(const Task& task);

}  // namespace senseprobe::datasets
