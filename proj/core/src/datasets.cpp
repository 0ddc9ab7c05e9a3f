#include "senseprobe/datasets.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "detail/csv.hpp"
#include "detail/fixtures.hpp"
#include "senseprobe/errors.hpp"
#include "senseprobe/matching.hpp"
#include "senseprobe/numerals.hpp"
#include "senseprobe/rng.hpp"

namespace senseprobe::datasets {

namespace {

using V = ComponentVariation;

struct TaskDef {
  std::string_view id;
  TaskKind kind;
  std::optional<BenchmarkKind> benchmark;
  std::vector<Component> components;
  std::vector<std::string> label_space;
  bool numeric_answer;
};

const std::vector<TaskDef>& task_defs() {
  static const std::vector<TaskDef> defs = {
      {"arithmetics", TaskKind::OpenQa, std::nullopt,
       {{"number1", "Number 1", V::TranslateOnly}, {"number2", "Number 2", V::TranslateOnly}},
       {}, true},
      {"elements-from-element", TaskKind::OpenQa, std::nullopt,
       {{"element", "Element", V::Fixed}}, {}, true},
      {"elements-from-position", TaskKind::OpenQa, std::nullopt,
       {{"period", "Period", V::Fixed}, {"group", "Group", V::Fixed}}, {}, true},
      {"olympics-100m", TaskKind::OpenQa, std::nullopt,
       {{"medal", "Medal", V::Fixed}, {"gender", "Gender", V::Fixed}, {"year", "Year", V::Fixed}},
       {}, false},
      {"olympics-downhill", TaskKind::OpenQa, std::nullopt,
       {{"medal", "Medal", V::Fixed}, {"gender", "Gender", V::Fixed}, {"year", "Year", V::Fixed}},
       {}, false},
      {"writers", TaskKind::OpenQa, std::nullopt, {{"author", "Author", V::Fixed}}, {}, true},
      {"companies", TaskKind::OpenQa, std::nullopt, {{"company", "Company", V::Fixed}}, {}, false},
      {"paws", TaskKind::Classification, BenchmarkKind::paws,
       {{"sentence1", "Sentence 1", V::Full}, {"sentence2", "Sentence 2", V::Full}},
       {"yes", "no"}, false},
      {"xnli", TaskKind::Classification, BenchmarkKind::xnli,
       {{"premise", "Premise", V::Full}, {"hypothesis", "Hypothesis", V::Full}},
       {"entailment", "contradiction", "neutral"}, false},
      {"copa", TaskKind::Classification, BenchmarkKind::copa,
       {{"premise", "Premise", V::Full},
        {"choice1", "Alternative 1", V::Full},
        {"choice2", "Alternative 2", V::Full}},
       {"alternative-1", "alternative-2"}, false},
      {"belebele", TaskKind::Classification, BenchmarkKind::belebele,
       {{"passage", "Passage", V::Full},
        {"question", "Question", V::Full},
        {"answer1", "Option A", V::Full},
        {"answer2", "Option B", V::Full},
        {"answer3", "Option C", V::Full},
        {"answer4", "Option D", V::Full}},
       {"a", "b", "c", "d"}, false},
  };
  return defs;
}

const TaskDef& find_def(std::string_view task_id) {
  for (const auto& d : task_defs()) {
    if (d.id == task_id) return d;
  }
  throw ConfigError("unknown task '" + std::string(task_id) + "'");
}

std::string pad(std::string_view digits, std::size_t width) {
  if (digits.size() >= width) return std::string(digits);
  return std::string(width - digits.size(), '0') + std::string(digits);
}

std::string pad_if_numeric(std::string id) {
  const bool numeric =
      !id.empty() && std::all_of(id.begin(), id.end(), [](char c) { return c >= '0' && c <= '9'; });
  return numeric ? pad(id, 6) : id;
}

std::vector<std::string> split_members(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto bar = cell.find('|', start);
    out.emplace_back(cell.substr(start, bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

void sort_and_check_unique(Task& task) {
  std::sort(task.datapoints.begin(), task.datapoints.end(),
            [](const Datapoint& a, const Datapoint& b) { return a.dp_id < b.dp_id; });
  for (std::size_t i = 1; i < task.datapoints.size(); ++i) {
    if (task.datapoints[i].dp_id == task.datapoints[i - 1].dp_id) {
      throw LoadError("duplicate dp_id '" + task.datapoints[i].dp_id + "'");
    }
  }
}

Datapoint label_datapoint(std::string dp_id, std::string label) {
  Datapoint dp;
  dp.dp_id = std::move(dp_id);
  dp.gold = AnswerClass::from_variants({std::move(label)});
  return dp;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return in;
}

// Symbols 1-118; period/group follow from the position.
constexpr std::array<std::string_view, 118> kSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",
    "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh",
    "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re",
    "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U",  "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db",
    "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

struct Position {
  int period;
  int group;  // 0 inside the f-block
};

Position position_of(int z) {
  constexpr std::array<int, 8> starts = {1, 3, 11, 19, 37, 55, 87, 119};
  int period = 1;
  while (z >= starts[period]) ++period;
  const int i = z - starts[period - 1];
  switch (period) {
    case 1: return {1, z == 1 ? 1 : 18};
    case 2:
    case 3: return {period, i < 2 ? i + 1 : i + 11};
    case 4:
    case 5: return {period, i + 1};
    default:
      if (i < 2) return {period, i + 1};
      if (i < 16) return {period, 0};
      return {period, i - 13};
  }
}

}  // namespace

const std::vector<std::string>& known_task_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& d : task_defs()) v.emplace_back(d.id);
    return v;
  }();
  return ids;
}

std::optional<std::string> shipped_instruction(std::string_view task_id,
                                               std::string_view sense_label) {
  const auto& fixture = detail::instruction_fixture();
  const auto task = fixture.find(std::string(task_id));
  if (task == fixture.end()) return std::nullopt;
  const std::string key = sense_label == "id" ? "en" : std::string(sense_label);
  const auto text = task->find(key);
  if (text == task->end()) return std::nullopt;
  return text->get<std::string>();
}

TaskSpec make_spec(std::string_view task_id) {
  const TaskDef& def = find_def(task_id);
  TaskSpec spec;
  spec.task_id = std::string(def.id);
  spec.kind = def.kind;
  spec.benchmark = def.benchmark;
  spec.components = def.components;
  spec.label_space = def.label_space;
  spec.numeric_answer = def.numeric_answer;
  auto instruction = shipped_instruction(task_id, "en");
  if (!instruction) throw ConfigError("no shipped instruction for " + spec.task_id);
  spec.instruction_template = std::move(*instruction);

  if (spec.kind == TaskKind::Classification) {
    const auto& lexicons = detail::lexicon_fixture().at(spec.task_id);
    for (const auto& [sense, table] : lexicons.items()) {
      LabelLexicon lex;
      for (const auto& [label, tokens] : table.items()) {
        lex[label] = tokens.get<std::vector<std::string>>();
      }
      spec.label_lexicon[sense] = std::move(lex);
    }
  }
  return spec;
}

Datapoint arithmetics_datapoint(std::string dp_id, int a, int b) {
  Datapoint dp;
  dp.dp_id = std::move(dp_id);
  dp.fields["number1"] = numerals::spell_number(a, Language::en);
  dp.fields["number2"] = numerals::spell_number(b, Language::en);
  dp.gold = AnswerClass::from_variants({std::to_string(a + b)});
  dp.metadata["summand1"] = std::to_string(a);
  dp.metadata["summand2"] = std::to_string(b);
  return dp;
}

Task build_arithmetics(std::uint64_t seed, int count) {
  if (count < 1) throw RangeError("arithmetics count must be at least 1");
  Task task{make_spec("arithmetics"), {}};
  const std::size_t width = std::max<std::size_t>(4, std::to_string(count).size());
  SplitMix64 rng(seed);
  task.datapoints.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int a = static_cast<int>(rng.uniform(1, 1000));
    const int b = static_cast<int>(rng.uniform(1, 1000));
    task.datapoints.push_back(arithmetics_datapoint(pad(std::to_string(i), width), a, b));
  }
  return task;
}

Task build_elements(ElementsSubtask subtask) {
  const bool from_element = subtask == ElementsSubtask::FromElement;
  Task task{make_spec(from_element ? "elements-from-element" : "elements-from-position"), {}};
  for (int z = 1; z <= static_cast<int>(kSymbols.size()); ++z) {
    const Position pos = position_of(z);
    if (pos.group == 0) continue;
    Datapoint dp;
    dp.dp_id = pad(std::to_string(z), 3);
    if (from_element) {
      dp.fields["element"] = std::string(kSymbols[z - 1]);
    } else {
      dp.fields["period"] = std::to_string(pos.period);
      dp.fields["group"] = std::to_string(pos.group);
    }
    dp.metadata["symbol"] = std::string(kSymbols[z - 1]);
    dp.gold = AnswerClass::from_variants({std::to_string(z)});
    task.datapoints.push_back(std::move(dp));
  }
  return task;
}

Task load_facts_csv(const std::filesystem::path& path, std::string_view task_id) {
  Task task{make_spec(task_id), {}};
  if (task.spec.kind != TaskKind::OpenQa || task_id == "arithmetics" ||
      task_id.rfind("elements", 0) == 0) {
    throw ConfigError("task '" + std::string(task_id) + "' is not loaded from a facts CSV");
  }
  auto in = open(path);
  const auto records = detail::read_csv(in);
  if (records.empty()) return task;

  const auto& header = records.front().fields;
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto require = [&](std::string_view name) {
    auto c = column(name);
    if (!c) throw LoadError("missing column '" + std::string(name) + "'", records.front().line);
    return *c;
  };

  const std::size_t id_col = require("dp_id");
  const std::size_t gold_col = require("gold");
  std::vector<std::pair<std::string, std::size_t>> component_cols;
  for (const auto& c : task.spec.components) component_cols.emplace_back(c.name, require(c.name));
  std::vector<std::size_t> variant_cols;
  std::set<std::size_t> known = {id_col, gold_col};
  for (const auto& [name, col] : component_cols) known.insert(col);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].rfind("variant", 0) == 0) {
      variant_cols.push_back(i);
      known.insert(i);
    }
  }
  const auto subset_col = column("subset_tag");
  const auto exclude_col = column("exclude");
  if (subset_col) known.insert(*subset_col);
  if (exclude_col) known.insert(*exclude_col);

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw LoadError("expected " + std::to_string(header.size()) + " fields, found " +
                          std::to_string(rec.fields.size()),
                      rec.line);
    }
    Datapoint dp;
    dp.dp_id = rec.fields[id_col];
    if (dp.dp_id.empty()) throw LoadError("empty dp_id", rec.line);
    for (const auto& [name, col] : component_cols) dp.fields[name] = rec.fields[col];
    dp.gold = AnswerClass::from_variants(split_members(rec.fields[gold_col]));
    if (dp.gold.empty()) throw LoadError("empty gold class", rec.line);
    for (auto col : variant_cols) {
      if (rec.fields[col].empty()) continue;
      auto cls = AnswerClass::from_variants(split_members(rec.fields[col]));
      if (!cls.empty()) dp.variant_classes.push_back(std::move(cls));
    }
    try {
      check_disjoint(dp.all_classes(), dp.dp_id);
      if (subset_col && !rec.fields[*subset_col].empty()) {
        dp.subset_tag = parse_language(rec.fields[*subset_col]);
      }
    } catch (const Error& e) {
      throw LoadError(e.what(), rec.line);
    }
    if (exclude_col) {
      const auto flag = matching::normalize(rec.fields[*exclude_col]).value();
      dp.excluded = flag == "1" || flag == "true" || flag == "yes";
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (!known.count(i)) dp.metadata[header[i]] = rec.fields[i];
    }
    task.datapoints.push_back(std::move(dp));
  }
  sort_and_check_unique(task);
  return task;
}

namespace {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto obj = nlohmann::json::parse(line);
      if (!obj.is_object()) throw LoadError("expected a JSON object", n);
      obj["__line"] = n;
      out.push_back(std::move(obj));
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(std::string("invalid JSON: ") + e.what(), n);
    }
  }
  return out;
}

std::string text_field(const nlohmann::json& obj, const char* key) {
  const std::size_t line = obj.at("__line").get<std::size_t>();
  auto it = obj.find(key);
  if (it == obj.end()) throw LoadError(std::string("missing field '") + key + "'", line);
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw LoadError(std::string("field '") + key + "' has the wrong type", line);
}

Task load_paws(const std::filesystem::path& path, std::size_t limit) {
  Task task{make_spec("paws"), {}};
  auto in = open(path);
  const auto rows = detail::read_tsv(in);
  if (rows.empty()) return task;
  const auto& header = rows.front().fields;
  auto col = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw LoadError("missing column '" + std::string(name) + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto id = col("id"), s1 = col("sentence1"), s2 = col("sentence2"), label = col("label");
  for (std::size_t r = 1; r < rows.size() && (limit == 0 || task.datapoints.size() < limit); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != header.size()) throw LoadError("wrong field count", rows[r].line);
    if (f[label] != "0" && f[label] != "1") throw LoadError("label must be 0 or 1", rows[r].line);
    auto dp = label_datapoint(pad_if_numeric(f[id]), f[label] == "1" ? "yes" : "no");
    dp.fields["sentence1"] = f[s1];
    dp.fields["sentence2"] = f[s2];
    task.datapoints.push_back(std::move(dp));
  }
  sort_and_check_unique(task);
  return task;
}

Task load_xnli(const std::filesystem::path& path, std::size_t limit) {
  Task task{make_spec("xnli"), {}};
  auto in = open(path);
  const auto rows = detail::read_tsv(in);
  if (rows.empty()) return task;
  const auto& header = rows.front().fields;
  auto col = [&](std::string_view name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw LoadError("missing column '" + std::string(name) + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto lang = col("language"), gold = col("gold_label"), s1 = col("sentence1"),
             s2 = col("sentence2"), pair = col("pairID");
  for (std::size_t r = 1; r < rows.size() && (limit == 0 || task.datapoints.size() < limit); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != header.size()) throw LoadError("wrong field count", rows[r].line);
    if (f[lang] != "en") continue;
    const std::string& label = f[gold];
    if (label != "entailment" && label != "contradiction" && label != "neutral") {
      throw LoadError("unknown gold_label '" + label + "'", rows[r].line);
    }
    auto dp = label_datapoint(pad_if_numeric(f[pair]), label);
    dp.fields["premise"] = f[s1];
    dp.fields["hypothesis"] = f[s2];
    task.datapoints.push_back(std::move(dp));
  }
  sort_and_check_unique(task);
  return task;
}

Task load_copa(const std::filesystem::path& path, std::size_t limit) {
  Task task{make_spec("copa"), {}};
  for (const auto& obj : read_jsonl(path)) {
    if (limit != 0 && task.datapoints.size() >= limit) break;
    const std::string label = text_field(obj, "label");
    if (label != "0" && label != "1") {
      throw LoadError("label must be 0 or 1", obj.at("__line").get<std::size_t>());
    }
    auto dp = label_datapoint(pad_if_numeric(text_field(obj, "idx")),
                              label == "0" ? "alternative-1" : "alternative-2");
    dp.fields["premise"] = text_field(obj, "premise");
    dp.fields["choice1"] = text_field(obj, "choice1");
    dp.fields["choice2"] = text_field(obj, "choice2");
    dp.metadata["question"] = text_field(obj, "question");
    task.datapoints.push_back(std::move(dp));
  }
  sort_and_check_unique(task);
  return task;
}

Task load_belebele(const std::filesystem::path& path, std::size_t limit) {
  Task task{make_spec("belebele"), {}};
  std::size_t row = 0;
  for (const auto& obj : read_jsonl(path)) {
    if (limit != 0 && task.datapoints.size() >= limit) break;
    const std::string answer = text_field(obj, "correct_answer_num");
    if (answer.size() != 1 || answer[0] < '1' || answer[0] > '4') {
      throw LoadError("correct_answer_num must be 1-4", obj.at("__line").get<std::size_t>());
    }
    auto dp = label_datapoint(pad(std::to_string(row++), 6),
                              std::string(1, static_cast<char>('a' + (answer[0] - '1'))));
    dp.fields["passage"] = text_field(obj, "flores_passage");
    dp.fields["question"] = text_field(obj, "question");
    for (int i = 1; i <= 4; ++i) {
      const std::string key = "mc_answer" + std::to_string(i);
      dp.fields["answer" + std::to_string(i)] = text_field(obj, key.c_str());
    }
    if (obj.contains("link")) dp.metadata["link"] = text_field(obj, "link");
    if (obj.contains("question_number")) {
      dp.metadata["question_number"] = text_field(obj, "question_number");
    }
    task.datapoints.push_back(std::move(dp));
  }
  sort_and_check_unique(task);
  return task;
}

}  // namespace

Task load_benchmark(BenchmarkKind kind, const std::filesystem::path& path, std::size_t limit) {
  switch (kind) {
    case BenchmarkKind::paws: return load_paws(path, limit);
    case BenchmarkKind::xnli: return load_xnli(path, limit);
    case BenchmarkKind::copa: return load_copa(path, limit);
    case BenchmarkKind::belebele: return load_belebele(path, limit);
  }
  throw ConfigError("unknown benchmark kind");
}

std::vector<std::string> placeholders(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '[') continue;
    std::size_t j = i + 1;
    if (j >= text.size() || text[j] < 'A' || text[j] > 'Z') continue;
    while (j < text.size() && ((text[j] >= 'A' && text[j] <= 'Z') ||
                               (text[j] >= '0' && text[j] <= '9') || text[j] == '_')) {
      ++j;
    }
    if (j < text.size() && text[j] == ']') {
      std::string name(text.substr(i + 1, j - i - 1));
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
      i = j;
    }
  }
  return out;
}

SenseTexts base_texts(const TaskSpec& spec, const Datapoint& dp) {
  SenseTexts texts;
  texts.instruction = spec.instruction_template;
  for (const auto& c : spec.components) {
    auto it = dp.fields.find(c.name);
    if (it != dp.fields.end()) texts.components[c.name] = it->second;
  }
  return texts;
}

std::string instantiate(const TaskSpec&, const Datapoint& dp, const SenseTexts& texts) {
  const std::string& tpl = texts.instruction;
  std::string out;
  out.reserve(tpl.size() * 2);
  std::size_t i = 0;
  while (i < tpl.size()) {
    if (tpl[i] == '[' && i + 1 < tpl.size() && tpl[i + 1] >= 'A' && tpl[i + 1] <= 'Z') {
      std::size_t j = i + 1;
      while (j < tpl.size() && ((tpl[j] >= 'A' && tpl[j] <= 'Z') ||
                                (tpl[j] >= '0' && tpl[j] <= '9') || tpl[j] == '_')) {
        ++j;
      }
      if (j < tpl.size() && tpl[j] == ']') {
        const std::string name = tpl.substr(i + 1, j - i - 1);
        std::string key = name;
        std::transform(key.begin(), key.end(), key.begin(),
                       [](char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c; });
        if (auto c = texts.components.find(key); c != texts.components.end()) {
          out += c->second;
        } else if (auto f = dp.fields.find(key); f != dp.fields.end()) {
          out += f->second;
        } else {
          throw PlaceholderError("unresolved placeholder " + name, name);
        }
        i = j + 1;
        continue;
      }
    }
    out += tpl[i++];
  }
  return out;
}

std::optional<std::string> localize_field(std::string_view field, std::string_view value,
                                          Language lang) {
  struct Entry {
    std::string_view field, en, de, it, nl, sv;
  };
  static constexpr std::array<Entry, 5> kTable = {{
      {"medal", "gold", "Gold", "d'oro", "gouden", "guld"},
      {"medal", "silver", "Silber", "d'argento", "zilveren", "silver"},
      {"medal", "bronze", "Bronze", "di bronzo", "bronzen", "brons"},
      {"gender", "men's", "Herren", "maschile", "heren", "herrarnas"},
      {"gender", "women's", "Damen", "femminile", "dames", "damernas"},
  }};
  for (const auto& e : kTable) {
    if (e.field != field || e.en != value) continue;
    switch (lang) {
      case Language::en: return std::string(e.en);
      case Language::de: return std::string(e.de);
      case Language::it: return std::string(e.it);
      case Language::nl: return std::string(e.nl);
      case Language::sv: return std::string(e.sv);
    }
  }
  return std::nullopt;
}

nlohmann::json task_to_json(const Task& task) {
  nlohmann::json dps = nlohmann::json::array();
  for (const auto& dp : task.datapoints) {
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& v : dp.variant_classes) variants.push_back(v.members());
    nlohmann::json j = {{"dp_id", dp.dp_id},
                        {"fields", dp.fields},
                        {"gold", dp.gold.members()},
                        {"variant_classes", std::move(variants)},
                        {"excluded", dp.excluded},
                        {"metadata", dp.metadata}};
    j["subset_tag"] = dp.subset_tag ? nlohmann::json(to_code(*dp.subset_tag)) : nlohmann::json(nullptr);
    dps.push_back(std::move(j));
  }
  return {{"task_id", task.spec.task_id}, {"datapoints", std::move(dps)}};
}

Task task_from_json(const nlohmann::json& j) {
  Task task{make_spec(j.at("task_id").get<std::string>()), {}};
  for (const auto& o : j.at("datapoints")) {
    Datapoint dp;
    dp.dp_id = o.at("dp_id").get<std::string>();
    dp.fields = o.at("fields").get<std::map<std::string, std::string>>();
    dp.gold = AnswerClass::from_variants(o.at("gold").get<std::vector<std::string>>());
    for (const auto& v : o.value("variant_classes", nlohmann::json::array())) {
      dp.variant_classes.push_back(AnswerClass::from_variants(v.get<std::vector<std::string>>()));
    }
    dp.excluded = o.value("excluded", false);
    if (o.contains("metadata")) dp.metadata = o["metadata"].get<std::map<std::string, std::string>>();
    if (o.contains("subset_tag") && !o["subset_tag"].is_null()) {
      dp.subset_tag = parse_language(o["subset_tag"].get<std::string>());
    }
    task.datapoints.push_back(std::move(dp));
  }
  sort_and_check_unique(task);
  return task;
}

void check_subset_balance(const Task& task) {
  std::map<Language, std::size_t> counts;
  for (const auto& dp : task.datapoints) {
    if (!dp.subset_tag) throw ConfigError("datapoint " + dp.dp_id + " has no subset_tag");
    ++counts[*dp.subset_tag];
  }
  if (counts.size() != kAllLanguages.size()) {
    throw ConfigError(task.spec.task_id + ": expected five subset_tag groups, found " +
                      std::to_string(counts.size()));
  }
  const std::size_t first = counts.begin()->second;
  for (const auto& [lang, n] : counts) {
    if (n != first) {
      throw ConfigError(task.spec.task_id + ": subset_tag groups differ in size (" +
                        std::string(to_code(lang)) + " has " + std::to_string(n) + ")");
    }
  }
}

}  // namespace senseprobe::datasets
