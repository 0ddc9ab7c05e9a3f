#include "senseprobe/task.hpp"

#include <algorithm>

#include "senseprobe/errors.hpp"
#include "senseprobe/matching.hpp"

namespace senseprobe {

std::string_view to_string(TaskKind kind) noexcept {
  return kind == TaskKind::OpenQa ? "open-qa" : "classification";
}

std::string_view to_string(BenchmarkKind kind) noexcept {
  switch (kind) {
    case BenchmarkKind::paws: return "paws";
    case BenchmarkKind::xnli: return "xnli";
    case BenchmarkKind::copa: return "copa";
    case BenchmarkKind::belebele: return "belebele";
  }
  return "paws";
}

BenchmarkKind parse_benchmark_kind(std::string_view name) {
  for (auto k : {BenchmarkKind::paws, BenchmarkKind::xnli, BenchmarkKind::copa,
                 BenchmarkKind::belebele}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown benchmark kind '" + std::string(name) + "'");
}

AnswerClass AnswerClass::from_variants(const std::vector<std::string>& raw) {
  AnswerClass cls;
  for (const auto& v : raw) {
    auto n = matching::normalize(v);
    if (!n.empty()) cls.members_.push_back(n.value());
  }
  std::sort(cls.members_.begin(), cls.members_.end());
  cls.members_.erase(std::unique(cls.members_.begin(), cls.members_.end()), cls.members_.end());
  return cls;
}

bool AnswerClass::contains(std::string_view normalized) const {
  return std::binary_search(members_.begin(), members_.end(), normalized);
}

bool AnswerClass::intersects(const AnswerClass& other) const {
  return std::any_of(members_.begin(), members_.end(),
                     [&](const std::string& m) { return other.contains(m); });
}

const Component* TaskSpec::find_component(std::string_view name) const {
  for (const auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool TaskSpec::has_variable_inputs() const {
  return std::any_of(components.begin(), components.end(), [](const Component& c) {
    return c.variation != ComponentVariation::Fixed;
  });
}

const LabelLexicon& TaskSpec::lexicon_for(std::string_view sense_label) const {
  auto it = label_lexicon.find(std::string(sense_label));
  if (it == label_lexicon.end() && (sense_label == "id" || sense_label == "en")) {
    it = label_lexicon.find("en");
  }
  if (it == label_lexicon.end()) {
    throw ConfigError("task " + task_id + " has no label lexicon for sense " +
                      std::string(sense_label));
  }
  return it->second;
}

std::vector<AnswerClass> Datapoint::all_classes() const {
  std::vector<AnswerClass> out;
  out.reserve(variant_classes.size() + 1);
  out.push_back(gold);
  out.insert(out.end(), variant_classes.begin(), variant_classes.end());
  return out;
}

std::vector<const Datapoint*> Task::active() const {
  std::vector<const Datapoint*> out;
  for (const auto& dp : datapoints) {
    if (!dp.excluded) out.push_back(&dp);
  }
  return out;
}

const Datapoint* Task::find(std::string_view dp_id) const {
  auto it = std::lower_bound(datapoints.begin(), datapoints.end(), dp_id,
                             [](const Datapoint& dp, std::string_view id) { return dp.dp_id < id; });
  if (it != datapoints.end() && it->dp_id == dp_id) return &*it;
  return nullptr;
}

void check_disjoint(const std::vector<AnswerClass>& classes, std::string_view context) {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      if (classes[i].intersects(classes[j])) {
        throw ConfigError("overlapping answer classes in " + std::string(context));
      }
    }
  }
}

}  // namespace senseprobe
