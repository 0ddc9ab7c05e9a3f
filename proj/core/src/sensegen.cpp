#include "senseprobe/sensegen.hpp"

#include <algorithm>
#include <set>

#include "senseprobe/errors.hpp"
#include "senseprobe/numerals.hpp"
#include "senseprobe/unicode.hpp"

namespace senseprobe::sensegen {

SenseSpec SenseSpec::parse(std::string_view label) {
  if (label == "id" || label == "en") return {std::string(label), Method::identity, Language::en};
  if (label == "en^P") return {"en^P", Method::paraphrase, Language::en};
  if (label.size() == 4 && label.substr(2) == "^T") {
    try {
      const Language lang = parse_language(label.substr(0, 2));
      if (lang != Language::en && label.substr(0, 2) == to_code(lang)) {
        return {std::string(label), Method::translation, lang};
      }
    } catch (const ParseError&) {
    }
  }
  throw ConfigError("unknown sense label '" + std::string(label) + "'");
}

std::string translation_prompt(std::string_view text, Language lang,
                               std::optional<BenchmarkKind> benchmark_input) {
  if (lang == Language::en) throw ConfigError("translation target must not be English");
  std::string prompt = "Please translate the following text into ";
  prompt += english_name(lang);
  if (benchmark_input == BenchmarkKind::belebele) prompt += " without answering the question";
  prompt += ":\n";
  prompt += text;
  return prompt;
}

std::string paraphrase_prompt(std::string_view text, std::optional<BenchmarkKind> benchmark_input) {
  constexpr std::string_view kReplyOnly =
      "Reply only with the paraphrased text and do not add any additional comments: \n";
  std::string prompt;
  if (!benchmark_input) {
    prompt = "Please paraphrase the following text:\n";
  } else {
    switch (*benchmark_input) {
      case BenchmarkKind::paws:
        prompt = "Please paraphrase the following two sentences (separately). ";
        prompt += kReplyOnly;
        break;
      case BenchmarkKind::xnli:
        prompt = "Please paraphrase the following premise and hypothesis (separately). ";
        prompt += kReplyOnly;
        break;
      case BenchmarkKind::copa:
        prompt = "Please paraphrase the following premise and two alternatives (separately). ";
        prompt += kReplyOnly;
        break;
      case BenchmarkKind::belebele:
        prompt =
            "Please paraphrase the following text passage, question, and multiple-choice answer "
            "options (separately). Make sure to paraphrase everything, including the passage and "
            "reply only with the paraphrased text and do not add any additional comments:\n";
        break;
    }
  }
  prompt += text;
  return prompt;
}

std::string compose_components(const TaskSpec& spec, const Datapoint& dp) {
  std::string out;
  for (const auto& c : spec.components) {
    if (c.variation != ComponentVariation::Full) continue;
    auto it = dp.fields.find(c.name);
    if (it == dp.fields.end()) throw PlaceholderError("datapoint " + dp.dp_id + " lacks " + c.name, c.name);
    if (!out.empty()) out += '\n';
    out += c.display + ": " + it->second;
  }
  return out;
}

namespace {

bool is_quote(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U'“': case U'”': case U'„': case U'«':
    case U'»': case U'‘': case U'’': case U'‚':
      return true;
    default:
      return false;
  }
}

std::string clean(std::string_view text) {
  std::u32string cps = unicode::decode(text);
  auto trim = [&] {
    std::size_t b = 0, e = cps.size();
    while (b < e && unicode::is_space(cps[b])) ++b;
    while (e > b && unicode::is_space(cps[e - 1])) --e;
    cps = cps.substr(b, e - b);
  };
  trim();
  if (cps.size() >= 2 && is_quote(cps.front()) && is_quote(cps.back())) {
    cps = cps.substr(1, cps.size() - 2);
    trim();
  }
  return unicode::encode(cps);
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto nl = text.find('\n', start);
    std::string line(text.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

// Leading whitespace and markdown emphasis/heading markers.
std::size_t marker_end(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '*' || line[i] == '#' ||
                             line[i] == '_')) {
    ++i;
  }
  return i;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

// Returns the content after "label:" when `line` opens with `label`.
std::optional<std::string> match_label(const std::string& line, std::string_view label) {
  std::size_t i = marker_end(line);
  if (ascii_lower(std::string_view(line).substr(i, label.size())) != ascii_lower(label)) return std::nullopt;
  i += label.size();
  while (i < line.size() && (line[i] == '*' || line[i] == '_' || line[i] == ' ')) ++i;
  if (i >= line.size() || line[i] != ':') return std::nullopt;
  return line.substr(i + 1);
}

// Any short "Label:" prefix (at most four words, no sentence punctuation).
std::optional<std::string> match_any_label(const std::string& line) {
  const std::size_t start = marker_end(line);
  const auto colon = line.find(':', start);
  if (colon == std::string::npos || colon == start || colon - start > 40) return std::nullopt;
  const std::string prefix = line.substr(start, colon - start);
  if (prefix.find_first_of(".?!\"") != std::string::npos) return std::nullopt;
  std::size_t words = 0;
  bool in_word = false;
  for (char c : prefix) {
    const bool space = c == ' ' || c == '\t';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  if (words == 0 || words > 4) return std::nullopt;
  return line.substr(colon + 1);
}

template <typename Matcher>
std::vector<std::string> sections(const std::vector<std::string>& lines, Matcher&& opens) {
  std::vector<std::string> out;
  for (const auto& line : lines) {
    if (auto content = opens(line, out.size())) {
      out.push_back(*content);
    } else if (!out.empty()) {
      out.back() += '\n';
      out.back() += line;
    }
  }
  return out;
}

std::optional<std::vector<std::string>> finish(std::vector<std::string> parts, std::size_t n) {
  if (parts.size() != n) return std::nullopt;
  for (auto& p : parts) {
    p = clean(p);
    if (p.empty()) return std::nullopt;
  }
  return parts;
}

}  // namespace

std::optional<std::vector<std::string>> split_components(std::string_view reply,
                                                         const std::vector<std::string>& labels) {
  const auto lines = lines_of(reply);
  const std::size_t n = labels.size();
  if (n == 0) return std::vector<std::string>{};

  auto named = sections(lines, [&](const std::string& line, std::size_t k) -> std::optional<std::string> {
    if (k >= n) return std::nullopt;
    return match_label(line, labels[k]);
  });
  if (auto parts = finish(named, n)) return parts;

  std::vector<std::string> generic =
      sections(lines, [](const std::string& line, std::size_t) { return match_any_label(line); });
  if (generic.size() == n + 1 && clean(generic.front()).empty()) generic.erase(generic.begin());
  if (auto parts = finish(generic, n)) return parts;
  // Line-per-component only when the reply carries no labels at all.
  if (!named.empty()) return std::nullopt;

  std::vector<std::string> nonempty;
  for (const auto& line : lines) {
    if (!clean(line).empty()) nonempty.push_back(line);
  }
  return finish(nonempty, n);
}

std::size_t SensedTask::failures() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(),
                                                [](const SensedEntry& e) { return e.failure.has_value(); }));
}

const SensedEntry* SensedTask::find(std::string_view dp_id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), dp_id,
                             [](const SensedEntry& e, std::string_view id) { return e.dp_id < id; });
  if (it != entries.end() && it->dp_id == dp_id) return &*it;
  return nullptr;
}

nlohmann::json SensedTask::to_json() const {
  nlohmann::json entries_json = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j = {{"dp_id", e.dp_id}, {"components", e.components}};
    if (e.failure) j["failure"] = *e.failure;
    if (e.numbers_valid) j["numbers_valid"] = *e.numbers_valid;
    entries_json.push_back(std::move(j));
  }
  return {{"base_task_id", base_task_id},
          {"sense", sense.label},
          {"condition", to_string(condition)},
          {"instruction_text", instruction_text},
          {"entries", std::move(entries_json)},
          {"generation_manifest",
           {{"model_id", manifest.model_id},
            {"temperature", manifest.temperature},
            {"max_tokens", manifest.max_tokens},
            {"instruction_hash", manifest.instruction_hash},
            {"input_hashes", manifest.input_hashes}}},
          {"usable", usable},
          {"note", note}};
}

SensedTask SensedTask::from_json(const nlohmann::json& j) {
  SensedTask t;
  t.base_task_id = j.at("base_task_id").get<std::string>();
  t.sense = SenseSpec::parse(j.at("sense").get<std::string>());
  t.condition = parse_condition(j.at("condition").get<std::string>());
  t.instruction_text = j.at("instruction_text").get<std::string>();
  for (const auto& e : j.at("entries")) {
    SensedEntry entry;
    entry.dp_id = e.at("dp_id").get<std::string>();
    entry.components = e.at("components").get<std::map<std::string, std::string>>();
    if (e.contains("failure")) entry.failure = e["failure"].get<std::string>();
    if (e.contains("numbers_valid")) entry.numbers_valid = e["numbers_valid"].get<bool>();
    t.entries.push_back(std::move(entry));
  }
  std::sort(t.entries.begin(), t.entries.end(),
            [](const SensedEntry& a, const SensedEntry& b) { return a.dp_id < b.dp_id; });
  const auto& m = j.at("generation_manifest");
  t.manifest.model_id = m.value("model_id", "");
  t.manifest.temperature = m.value("temperature", modelclient::kDefaultTemperature);
  t.manifest.max_tokens = m.value("max_tokens", modelclient::kDefaultMaxTokens);
  t.manifest.instruction_hash = m.value("instruction_hash", "");
  if (m.contains("input_hashes")) {
    t.manifest.input_hashes = m["input_hashes"].get<std::map<std::string, std::string>>();
  }
  t.usable = j.value("usable", true);
  t.note = j.value("note", "");
  return t;
}

datasets::SenseTexts texts_for(const SensedTask& sensed, const SensedEntry& entry) {
  return {sensed.instruction_text, entry.components};
}

namespace {

modelclient::CompletionRequest make_request(const GenerationOptions& options, std::string prompt,
                                            std::string dp_id, std::string_view sense,
                                            Condition condition) {
  modelclient::CompletionRequest req;
  req.model_id = options.model_id;
  req.prompt = std::move(prompt);
  req.temperature = options.temperature;
  req.max_tokens = options.max_tokens;
  req.dp_id = std::move(dp_id);
  req.sense = std::string(sense);
  req.condition = std::string(to_string(condition));
  req.purpose = "sense";
  return req;
}

std::string generation_prompt(const SenseSpec& sense, std::string_view text,
                              std::optional<BenchmarkKind> benchmark_input) {
  return sense.method == Method::translation
             ? translation_prompt(text, sense.target, benchmark_input)
             : paraphrase_prompt(text, benchmark_input);
}

}  // namespace

NumberTranslation translate_arithmetics_numbers(const std::vector<const Datapoint*>& datapoints,
                                                Language lang, modelclient::Client& client,
                                                const GenerationOptions& options,
                                                std::string_view sense_label) {
  if (lang == Language::en) throw ConfigError("translation target must not be English");
  std::function<NumberTranslationItem(const Datapoint* const&)> one = [&](const Datapoint* const& dp) {
    NumberTranslationItem item;
    item.dp_id = dp->dp_id;
    const std::string& a = dp->fields.at("number1");
    const std::string& b = dp->fields.at("number2");
    auto ra = client.complete(make_request(options, translation_prompt(a, lang), dp->dp_id,
                                           sense_label, Condition::full));
    auto rb = client.complete(make_request(options, translation_prompt(b, lang), dp->dp_id,
                                           sense_label, Condition::full));
    item.translated = {clean(ra.raw_text), clean(rb.raw_text)};
    const auto check = numerals::check_number_translation({a, b}, item.translated, lang);
    item.valid = check.valid;
    item.diagnostic = check.diagnostic;
    item.request_hashes = ra.request_hash + "+" + rb.request_hash;
    return item;
  };
  NumberTranslation out;
  out.items = modelclient::bounded_map(datapoints, options.max_concurrency, one);
  std::size_t valid = 0;
  for (const auto& item : out.items) valid += item.valid;
  if (!out.items.empty()) out.validity = static_cast<double>(valid) / static_cast<double>(out.items.size());
  return out;
}

SensedTask generate_sense(const Task& task, const SenseSpec& sense, modelclient::Client& client,
                          Condition condition, const GenerationOptions& options) {
  if (sense.method == Method::identity) throw ConfigError("identity senses reuse the base texts");
  if (condition != Condition::full && condition != Condition::I && condition != Condition::X) {
    throw ConfigError("sense generation supports conditions full, I and X");
  }
  const TaskSpec& spec = task.spec;
  const bool new_instruction = condition != Condition::X;
  const bool new_inputs = condition != Condition::I;

  SensedTask out;
  out.base_task_id = spec.task_id;
  out.sense = sense;
  out.condition = condition;
  out.manifest.model_id = options.model_id;
  out.manifest.temperature = options.temperature;
  out.manifest.max_tokens = options.max_tokens;

  out.instruction_text = spec.instruction_template;
  if (new_instruction) {
    auto rec = client.complete(make_request(options, generation_prompt(sense, spec.instruction_template, std::nullopt),
                                            "", sense.label, condition));
    out.instruction_text = clean(rec.raw_text);
    out.manifest.instruction_hash = rec.request_hash;
    auto want = datasets::placeholders(spec.instruction_template);
    auto got = datasets::placeholders(out.instruction_text);
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) {
      std::vector<std::string> lost;
      std::set_symmetric_difference(want.begin(), want.end(), got.begin(), got.end(),
                                    std::back_inserter(lost));
      throw PlaceholderError(spec.task_id + " " + sense.label + ": generated instruction changes placeholder [" +
                                 lost.front() + "]",
                             lost.front());
    }
  }

  const auto active = task.active();
  std::vector<SensedEntry> entries(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    entries[i].dp_id = active[i]->dp_id;
    for (const auto& c : spec.components) {
      auto it = active[i]->fields.find(c.name);
      if (it == active[i]->fields.end()) continue;
      std::string value = it->second;
      if (new_inputs && c.variation == ComponentVariation::Fixed && sense.method == Method::translation) {
        if (auto local = datasets::localize_field(c.name, value, sense.target)) value = *local;
      }
      entries[i].components[c.name] = std::move(value);
    }
  }

  std::vector<std::string> full_names;
  std::vector<std::string> full_displays;
  for (const auto& c : spec.components) {
    if (c.variation == ComponentVariation::Full) {
      full_names.push_back(c.name);
      full_displays.push_back(c.display);
    }
  }

  const bool numbers = std::any_of(spec.components.begin(), spec.components.end(), [](const Component& c) {
    return c.variation == ComponentVariation::TranslateOnly;
  });

  if (new_inputs && numbers && sense.method == Method::translation) {
    const auto tr = translate_arithmetics_numbers(active, sense.target, client, options, sense.label);
    for (std::size_t i = 0; i < active.size(); ++i) {
      entries[i].components["number1"] = tr.items[i].translated.first;
      entries[i].components["number2"] = tr.items[i].translated.second;
      entries[i].numbers_valid = tr.items[i].valid;
      out.manifest.input_hashes[entries[i].dp_id] = tr.items[i].request_hashes;
    }
  } else if (new_inputs && !full_names.empty()) {
    struct Generated {
      std::optional<std::vector<std::string>> parts;
      std::string hash;
    };
    std::function<Generated(const Datapoint* const&)> one = [&](const Datapoint* const& dp) {
      const std::string prompt = generation_prompt(sense, compose_components(spec, *dp), spec.benchmark);
      auto rec = client.complete(make_request(options, prompt, dp->dp_id, sense.label, condition));
      return Generated{split_components(rec.raw_text, full_displays), rec.request_hash};
    };
    const auto generated = modelclient::bounded_map(active, options.max_concurrency, one);
    for (std::size_t i = 0; i < active.size(); ++i) {
      out.manifest.input_hashes[entries[i].dp_id] = generated[i].hash;
      if (!generated[i].parts) {
        entries[i].failure = "could not split reply into " + std::to_string(full_names.size()) + " components";
        continue;
      }
      for (std::size_t k = 0; k < full_names.size(); ++k) {
        entries[i].components[full_names[k]] = (*generated[i].parts)[k];
      }
    }
  }

  out.entries = std::move(entries);
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SensedEntry& a, const SensedEntry& b) { return a.dp_id < b.dp_id; });
  if (!out.entries.empty()) {
    const double rate = static_cast<double>(out.failures()) / static_cast<double>(out.entries.size());
    if (rate > kMaxFailureRate) {
      out.usable = false;
      out.note = std::to_string(out.failures()) + " of " + std::to_string(out.entries.size()) +
                 " datapoints could not be split back into components";
    }
  }
  return out;
}

}  // namespace senseprobe::sensegen
