#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "senseprobe/language.hpp"

namespace senseprobe {

enum class TaskKind { OpenQa, Classification };

enum class BenchmarkKind { paws, xnli, copa, belebele };

std::string_view to_string(TaskKind kind) noexcept;
std::string_view to_string(BenchmarkKind kind) noexcept;
BenchmarkKind parse_benchmark_kind(std::string_view name);

/// Equivalence set of normalized answer strings.
///
/// Members are stored normalized, sorted and unique; construct through
/// `from_variants` to normalize raw strings.
class AnswerClass {
 public:
  AnswerClass() = default;

  /// Normalizes every variant; empty results are dropped.
  static AnswerClass from_variants(const std::vector<std::string>& raw);

  bool contains(std::string_view normalized) const;
  bool intersects(const AnswerClass& other) const;
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<std::string>& members() const noexcept { return members_; }

  friend bool operator==(const AnswerClass&, const AnswerClass&) = default;

 private:
  std::vector<std::string> members_;
};

/// How a component changes when a new sense is generated.
enum class ComponentVariation {
  Fixed,          // entity names, years, ... stay as in the base data
  TranslateOnly,  // spelled-out numbers: translated one by one, never paraphrased
  Full,           // benchmark input text: paraphrased and translated
};

struct Component {
  std::string name;     // lowercase; placeholder is the uppercase form
  std::string display;  // label used in generation prompts ("Sentence 1")
  ComponentVariation variation = ComponentVariation::Fixed;
};

/// label -> surface tokens, for one sense.
using LabelLexicon = std::map<std::string, std::vector<std::string>>;

struct TaskSpec {
  std::string task_id;
  TaskKind kind = TaskKind::OpenQa;
  std::optional<BenchmarkKind> benchmark;
  std::string instruction_template;  // English, with [PLACEHOLDER]s
  std::vector<Component> components;
  std::vector<std::string> label_space;
  std::map<std::string, LabelLexicon> label_lexicon;  // sense label -> lexicon
  bool numeric_answer = false;                        // answers are decimal numbers

  const Component* find_component(std::string_view name) const;
  bool has_variable_inputs() const;
  /// Lexicon for a sense label; identity senses ("id") fall back to "en".
  const LabelLexicon& lexicon_for(std::string_view sense_label) const;
};

struct Datapoint {
  std::string dp_id;
  std::map<std::string, std::string> fields;
  AnswerClass gold;  // singleton {label} for classification tasks
  std::vector<AnswerClass> variant_classes;
  std::optional<Language> subset_tag;
  bool excluded = false;
  std::map<std::string, std::string> metadata;

  /// Gold followed by variant classes.
  std::vector<AnswerClass> all_classes() const;
};

struct Task {
  TaskSpec spec;
  std::vector<Datapoint> datapoints;  // sorted by dp_id

  /// Datapoints not flagged as excluded.
  std::vector<const Datapoint*> active() const;
  const Datapoint* find(std::string_view dp_id) const;
};

/// Throws ConfigError when two classes of the same datapoint overlap.
void check_disjoint(const std::vector<AnswerClass>& classes, std::string_view context);

}  // namespace senseprobe
