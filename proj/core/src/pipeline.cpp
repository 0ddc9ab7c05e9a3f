#include "senseprobe/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "senseprobe/datasets.hpp"
#include "senseprobe/errors.hpp"
#include "senseprobe/matching.hpp"
#include "senseprobe/mtquality.hpp"

namespace senseprobe::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

// Write-then-rename, so an interrupted run never leaves a torn artifact.
void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || p == "-") return p;
  return (base / p).lexically_normal();
}

std::string run_stem(std::string_view sense, Condition condition, const std::optional<std::string>& tag) {
  std::string s = std::string(sense) + "__" + std::string(to_string(condition));
  if (tag) s += "-" + *tag;
  return s;
}

bool is_identity(std::string_view sense) { return sense == "id" || sense == "en"; }

// Classification replies are read with the lexicon of the instruction's
// language; condition X keeps the English instruction.
std::string lexicon_sense(std::string_view sense, Condition condition) {
  if (condition == Condition::X || is_identity(sense)) return "en";
  return std::string(sense);
}

std::string join_variable(const TaskSpec& spec, const std::map<std::string, std::string>& comps) {
  std::string out;
  for (const auto& c : spec.components) {
    if (c.variation == ComponentVariation::Fixed) continue;
    auto it = comps.find(c.name);
    if (it == comps.end()) continue;
    if (!out.empty()) out += '\n';
    out += it->second;
  }
  return out;
}

bool covers(const References& refs, Language lang) {
  return std::any_of(refs.begin(), refs.end(), [&](const auto& r) { return r.first.second == lang; });
}

struct AlignedPair {
  metrics::ScoredRun source;
  metrics::ScoredRun alt;
  std::size_t excluded = 0;
};

}  // namespace

// ---- config ----------------------------------------------------------------

json ModelConfig::to_json() const {
  return {{"backend", backend},
          {"base_url", base_url},
          {"model", model},
          {"temperature", temperature},
          {"max_tokens", max_tokens},
          {"max_concurrency", max_concurrency},
          {"requests_per_second", requests_per_second},
          {"retries", retries},
          {"table", table.generic_string()},
          {"labels", labels},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const json& j, const fs::path& base_dir) {
  ModelConfig m;
  m.backend = j.value("backend", m.backend);
  m.base_url = j.value("base_url", m.base_url);
  m.model = j.value("model", m.model);
  m.temperature = j.value("temperature", m.temperature);
  m.max_tokens = j.value("max_tokens", m.max_tokens);
  m.max_concurrency = j.value("max_concurrency", m.max_concurrency);
  m.requests_per_second = j.value("requests_per_second", m.requests_per_second);
  m.retries = j.value("retries", m.retries);
  m.table = resolve(j.value("table", std::string()), base_dir);
  m.labels = j.value("labels", m.labels);
  m.seed = j.value("seed", m.seed);
  if (m.max_concurrency == 0) throw ConfigError("max_concurrency must be positive");
  return m;
}

json TaskConfig::to_json() const {
  return {{"id", id},     {"path", path.generic_string()}, {"count", count},
          {"seed", seed}, {"limit", limit},                {"split", split}};
}

TaskConfig TaskConfig::from_json(const json& j, const fs::path& base_dir) {
  TaskConfig t;
  if (j.is_string()) {
    t.id = j.get<std::string>();
    return t;
  }
  t.id = j.at("id").get<std::string>();
  t.path = resolve(j.value("path", std::string()), base_dir);
  t.count = j.value("count", t.count);
  t.seed = j.value("seed", t.seed);
  t.limit = j.value("limit", t.limit);
  t.split = j.value("split", t.split);
  return t;
}

json Config::to_json() const {
  json j;
  j["run_dir"] = run_dir.generic_string();
  j["cache_dir"] = cache_dir.generic_string();
  j["model"] = model.to_json();
  j["sense_model"] = sense_model ? sense_model->to_json() : json(nullptr);
  j["tasks"] = json::array();
  for (const auto& t : tasks) j["tasks"].push_back(t.to_json());
  j["senses"] = senses;
  j["conditions"] = json::array();
  for (auto c : conditions) j["conditions"].push_back(std::string(to_string(c)));
  j["baseline"] = baseline;
  j["reference_swap"] = reference_swap;
  j["scoring"] = {{"containment", scoring.containment},
                  {"extract_numeric", scoring.extract_numeric},
                  {"quality_threshold", scoring.quality_threshold}};
  j["references"] = json::object();
  for (const auto& [k, v] : references) j["references"][k] = v.generic_string();
  j["neural_scores"] = json::object();
  for (const auto& [k, v] : neural_scores) j["neural_scores"][k] = v.generic_string();
  j["seed"] = seed;
  return j;
}

Config Config::from_json(const json& j, const fs::path& base_dir) {
  try {
    Config c;
    c.run_dir = resolve(j.value("run_dir", std::string("run")), base_dir);
    c.cache_dir = resolve(j.value("cache_dir", std::string()), base_dir);
    if (j.contains("model")) c.model = ModelConfig::from_json(j.at("model"), base_dir);
    if (j.contains("sense_model") && !j.at("sense_model").is_null())
      c.sense_model = ModelConfig::from_json(j.at("sense_model"), base_dir);
    const json tasks = j.value("tasks", json::array());
    for (const auto& t : tasks) c.tasks.push_back(TaskConfig::from_json(t, base_dir));
    if (j.contains("senses")) c.senses = j.at("senses").get<std::vector<std::string>>();
    for (const auto& s : c.senses) sensegen::SenseSpec::parse(s);
    c.reference_swap = j.value("reference_swap", false);
    if (j.contains("conditions")) {
      c.conditions.clear();
      for (const auto& s : j.at("conditions")) {
        const Condition cond = parse_condition(s.get<std::string>());
        if (cond == Condition::reference_swap) {
          c.reference_swap = true;
        } else if (cond == Condition::id_baseline) {
          c.baseline = true;
        } else {
          c.conditions.push_back(cond);
        }
      }
    }
    if (std::find(c.conditions.begin(), c.conditions.end(), Condition::full) == c.conditions.end())
      c.conditions.insert(c.conditions.begin(), Condition::full);
    c.baseline = j.value("baseline", c.baseline);
    if (j.contains("scoring")) {
      const auto& s = j.at("scoring");
      c.scoring.containment = s.value("containment", c.scoring.containment);
      c.scoring.extract_numeric = s.value("extract_numeric", c.scoring.extract_numeric);
      c.scoring.quality_threshold = s.value("quality_threshold", c.scoring.quality_threshold);
    }
    const json refs = j.value("references", json::object());
    for (const auto& [k, v] : refs.items()) c.references[k] = resolve(v.get<std::string>(), base_dir);
    const json neural = j.value("neural_scores", json::object());
    for (const auto& [k, v] : neural.items()) c.neural_scores[k] = resolve(v.get<std::string>(), base_dir);
    c.seed = j.value("seed", c.seed);
    for (const auto& t : c.tasks) datasets::make_spec(t.id);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Config load_config(const fs::path& path) {
  const json j = read_json_file(path);
  return Config::from_json(j, fs::absolute(path).parent_path());
}

void apply(Config& config, const Overrides& o) {
  auto patch = [&](ModelConfig& m) {
    if (o.base_url) m.base_url = *o.base_url;
    if (o.model) m.model = *o.model;
    if (o.temperature) m.temperature = *o.temperature;
    if (o.max_concurrency) m.max_concurrency = *o.max_concurrency;
  };
  patch(config.model);
  if (config.sense_model) patch(*config.sense_model);
  if (o.cache_dir) config.cache_dir = *o.cache_dir;
}

std::shared_ptr<modelclient::Client> make_client(const ModelConfig& config) {
  const auto& b = config.backend;
  if (b == "http") {
    modelclient::HttpConfig h;
    h.base_url = config.base_url;
    h.model = config.model;
    h.retries = config.retries;
    h.requests_per_second = config.requests_per_second;
    return std::make_shared<modelclient::HttpChatClient>(h);
  }
  if (b == "echo") return modelclient::echo_model();
  if (b == "random") return modelclient::random_choice_model(config.labels, config.seed);
  if (b == "oracle" || b == "form-tied" || b == "scripted") {
    if (config.table.empty()) throw ConfigError("backend " + b + " needs a table file");
    const json t = read_json_file(config.table);
    try {
      if (b == "oracle") return modelclient::fact_oracle_model(t.get<std::map<std::string, std::string>>());
      if (b == "form-tied")
        return modelclient::form_tied_model(t.get<std::map<std::string, std::map<std::string, std::string>>>());
      std::optional<std::string> fallback;
      if (t.contains("default") && !t.at("default").is_null()) fallback = t.at("default").get<std::string>();
      return modelclient::scripted_model(t.at("replies").get<std::map<std::string, std::string>>(), fallback);
    } catch (const json::exception& e) {
      throw ConfigError(config.table.string() + ": " + e.what());
    }
  }
  throw ConfigError("unknown backend '" + b + "'");
}

References load_references(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  References refs;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      auto key = std::make_pair(j.at("dp_id").get<std::string>(), parse_language(j.at("lang").get<std::string>()));
      auto comps = j.at("components").get<std::map<std::string, std::string>>();
      if (!refs.emplace(std::move(key), std::move(comps)).second) throw LoadError("duplicate reference row", n);
    } catch (const json::exception& e) {
      throw LoadError(path.string() + ": " + e.what(), n);
    } catch (const ParseError& e) {
      throw LoadError(path.string() + ": " + e.what(), n);
    }
  }
  return refs;
}

// ---- scoring ---------------------------------------------------------------

metrics::ScoredRun score_records(const Task& task, const std::vector<ResponseRecord>& records,
                                 const std::string& lexicon_sense, ScoringMode mode) {
  metrics::ScoredRun run;
  run.kind = task.spec.kind;
  const bool cls = task.spec.kind == TaskKind::Classification;
  const LabelLexicon* lexicon = cls ? &task.spec.lexicon_for(lexicon_sense) : nullptr;
  for (const auto& rec : records) {
    const Datapoint* dp = task.find(rec.dp_id);
    if (!dp) throw AlignmentError("response for unknown datapoint " + rec.dp_id);
    if (dp->excluded) continue;
    metrics::ScoredItem item;
    item.dp_id = rec.dp_id;
    item.request_hash = rec.request_hash;
    item.response = matching::normalize(rec.raw_text);
    if (cls) {
      item.label = matching::map_label(item.response, *lexicon);
      item.correct = item.label && dp->gold.contains(*item.label);
    } else if (mode == ScoringMode::containment) {
      item.correct = matching::contains_answer(rec.raw_text, dp->gold);
    } else {
      if (mode == ScoringMode::extract_numeric) {
        if (auto x = matching::extract_numeric(rec.raw_text)) item.response = matching::normalize(*x);
      }
      item.correct = dp->gold.contains(item.response.value());
    }
    run.items.push_back(std::move(item));
  }
  metrics::sort_items(run);
  return run;
}

void align(metrics::ScoredRun& a, metrics::ScoredRun& b) {
  std::set<std::string> in_a, common;
  for (const auto& i : a.items) in_a.insert(i.dp_id);
  for (const auto& i : b.items)
    if (in_a.count(i.dp_id)) common.insert(i.dp_id);
  auto keep = [&](metrics::ScoredRun& r) {
    std::erase_if(r.items, [&](const metrics::ScoredItem& i) { return !common.count(i.dp_id); });
  };
  keep(a);
  keep(b);
}

// ---- pipeline --------------------------------------------------------------

Pipeline::Pipeline(Config config, std::shared_ptr<modelclient::Client> answer_client,
                   std::shared_ptr<modelclient::Client> sense_client)
    : config_(std::move(config)) {
  if (!answer_client) throw ConfigError("no answer client");
  if (!sense_client) sense_client = answer_client;
  if (config_.cache_dir != "-") {
    const fs::path dir = config_.cache_dir.empty() ? config_.run_dir / "cache" : config_.cache_dir;
    cache_ = std::make_shared<modelclient::ResponseCache>(dir);
    auto wrapped = std::make_shared<modelclient::CachedClient>(answer_client, cache_);
    answer_ = wrapped;
    sense_ = sense_client == answer_client
                 ? std::shared_ptr<modelclient::Client>(wrapped)
                 : std::make_shared<modelclient::CachedClient>(sense_client, cache_);
  } else {
    answer_ = std::move(answer_client);
    sense_ = std::move(sense_client);
  }
}

const TaskConfig& Pipeline::task_config(const std::string& task_id) const {
  for (const auto& t : config_.tasks)
    if (t.id == task_id) return t;
  throw ConfigError("task '" + task_id + "' is not configured");
}

void Pipeline::record_manifest(const std::string& section, const std::string& key, const json& value) {
  const fs::path path = config_.run_dir / "manifest.json";
  json j = fs::exists(path) ? read_json_file(path) : json::object();
  j["config"] = config_.to_json();
  j[section][key] = value;
  write_file(path, j.dump(2) + "\n");
}

Task Pipeline::task(const std::string& task_id) {
  if (auto it = tasks_.find(task_id); it != tasks_.end()) return it->second;
  const TaskConfig& tc = task_config(task_id);
  const fs::path snapshot = config_.run_dir / "tasks" / (task_id + ".json");
  Task t;
  if (fs::exists(snapshot)) {
    t = datasets::task_from_json(read_json_file(snapshot));
  } else {
    const TaskSpec spec = datasets::make_spec(task_id);
    if (task_id == "arithmetics") {
      t = datasets::build_arithmetics(tc.seed, tc.count);
    } else if (task_id == "elements-from-element") {
      t = datasets::build_elements(datasets::ElementsSubtask::FromElement);
    } else if (task_id == "elements-from-position") {
      t = datasets::build_elements(datasets::ElementsSubtask::FromPosition);
    } else if (tc.path.empty()) {
      throw ConfigError("task '" + task_id + "' needs a data path");
    } else if (spec.benchmark) {
      t = datasets::load_benchmark(*spec.benchmark, tc.path, tc.limit);
    } else {
      t = datasets::load_facts_csv(tc.path, task_id);
    }
    write_file(snapshot, datasets::task_to_json(t).dump() + "\n");
    record_manifest("tasks", task_id,
                    {{"datapoints", t.datapoints.size()}, {"active", t.active().size()},
                     {"snapshot", fs::relative(snapshot, config_.run_dir).generic_string()}});
  }
  tasks_.emplace(task_id, t);
  return t;
}

void Pipeline::generate_data() {
  for (const auto& tc : config_.tasks) task(tc.id);
}

std::vector<std::string> Pipeline::senses_for(const Task&) const {
  std::vector<std::string> out;
  for (const auto& s : config_.senses)
    if (!is_identity(s)) out.push_back(s);
  return out;
}

std::vector<Condition> Pipeline::conditions_for(const Task& task) const {
  std::vector<Condition> out;
  for (auto c : config_.conditions) {
    // Ablations separate instruction from input text; fact tasks have no
    // free-text input to vary.
    if (c != Condition::full && !task.spec.benchmark) continue;
    out.push_back(c);
  }
  return out;
}

std::optional<sensegen::SensedTask> Pipeline::load_sense(const std::string& task_id, const std::string& sense,
                                                         Condition condition) const {
  const fs::path p = config_.run_dir / "senses" / task_id / (run_stem(sense, condition, std::nullopt) + ".json");
  if (!fs::exists(p)) return std::nullopt;
  return sensegen::SensedTask::from_json(read_json_file(p));
}

sensegen::SensedTask Pipeline::make_sense(const Task& task, const std::string& sense, Condition condition) {
  if (auto existing = load_sense(task.spec.task_id, sense, condition)) return *existing;
  const auto spec = sensegen::SenseSpec::parse(sense);
  const ModelConfig& mc = config_.sense_model ? *config_.sense_model : config_.model;
  sensegen::GenerationOptions options{mc.model, mc.temperature, mc.max_tokens, mc.max_concurrency};
  sensegen::SensedTask sensed;
  try {
    sensed = sensegen::generate_sense(task, spec, *sense_, condition, options);
  } catch (const PlaceholderError& e) {
    sensed.base_task_id = task.spec.task_id;
    sensed.sense = spec;
    sensed.condition = condition;
    sensed.usable = false;
    sensed.note = e.what();
    sensed.manifest.model_id = mc.model;
    sensed.manifest.temperature = mc.temperature;
    sensed.manifest.max_tokens = mc.max_tokens;
  }
  const std::string stem = run_stem(sense, condition, std::nullopt);
  write_file(config_.run_dir / "senses" / task.spec.task_id / (stem + ".json"), sensed.to_json().dump() + "\n");
  record_manifest("senses", task.spec.task_id + "/" + stem,
                  {{"usable", sensed.usable}, {"failures", sensed.failures()}, {"note", sensed.note}});
  return sensed;
}

void Pipeline::make_senses() {
  for (const auto& tc : config_.tasks) {
    const Task t = task(tc.id);
    for (const auto& s : senses_for(t))
      for (auto c : conditions_for(t)) make_sense(t, s, c);
  }
}

std::optional<References> Pipeline::references_for(const std::string& task_id) {
  if (auto it = references_.find(task_id); it != references_.end()) return it->second;
  auto path = config_.references.find(task_id);
  if (path == config_.references.end()) return std::nullopt;
  auto refs = load_references(path->second);
  references_.emplace(task_id, refs);
  return refs;
}

CollectedRun Pipeline::collect(const Task& task, const std::string& sense, Condition condition,
                               const std::optional<std::string>& run_tag) {
  CollectedRun run;
  auto& m = run.manifest;
  m.task_id = task.spec.task_id;
  m.sense = sense;
  m.condition = condition;
  m.model_id = config_.model.model;
  m.temperature = config_.model.temperature;
  m.max_tokens = config_.model.max_tokens;
  m.seed = config_.seed;
  if (run_tag) m.nonce = run_stem(sense, condition, run_tag) + "/" + std::to_string(config_.seed);
  m.use_cache = cache_ != nullptr;
  m.started_at = utc_timestamp();

  struct Job {
    std::string dp_id;
    std::string prompt;
  };
  std::vector<Job> jobs;
  const auto active = task.active();
  if (is_identity(sense)) {
    for (const Datapoint* dp : active)
      jobs.push_back({dp->dp_id, datasets::instantiate(task.spec, *dp, datasets::base_texts(task.spec, *dp))});
  } else {
    const Condition gen = condition == Condition::reference_swap ? Condition::full : condition;
    const auto sensed = make_sense(task, sense, gen);
    if (!sensed.usable) throw ConfigError(m.task_id + " " + sense + " is unusable: " + sensed.note);
    std::optional<References> refs;
    if (condition == Condition::reference_swap) {
      refs = references_for(m.task_id);
      if (!refs) throw ConfigError("no reference inputs configured for " + m.task_id);
    }
    for (const Datapoint* dp : active) {
      const auto* entry = sensed.find(dp->dp_id);
      if (!entry || entry->failure) {
        ++run.skipped;
        continue;
      }
      datasets::SenseTexts texts = sensegen::texts_for(sensed, *entry);
      if (refs) {
        auto it = refs->find({dp->dp_id, sensed.sense.target});
        if (it == refs->end()) {
          ++run.skipped;
          continue;
        }
        for (const auto& c : task.spec.components)
          if (c.variation != ComponentVariation::Fixed && it->second.count(c.name))
            texts.components[c.name] = it->second.at(c.name);
      }
      jobs.push_back({dp->dp_id, datasets::instantiate(task.spec, *dp, texts)});
    }
  }

  struct Outcome {
    std::optional<ResponseRecord> record;
    std::string error;
  };
  const std::string request_sense = sense == "id" ? "en" : sense;
  const auto outcomes = modelclient::bounded_map<Job, Outcome>(
      jobs, config_.model.max_concurrency, [&](const Job& job) -> Outcome {
        modelclient::CompletionRequest req;
        req.model_id = m.model_id;
        req.prompt = job.prompt;
        req.temperature = m.temperature;
        req.max_tokens = m.max_tokens;
        req.dp_id = job.dp_id;
        req.sense = request_sense;
        req.condition = std::string(to_string(condition));
        req.purpose = "answer";
        req.nonce = m.nonce;
        try {
          return {answer_->complete(req), {}};
        } catch (const PermanentError&) {
          throw;
        } catch (const TransportError& e) {
          return {std::nullopt, e.what()};
        }
      });

  const bool cls = task.spec.kind == TaskKind::Classification;
  const LabelLexicon* lexicon = cls ? &task.spec.lexicon_for(lexicon_sense(sense, condition)) : nullptr;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!outcomes[i].record) {
      run.failures[jobs[i].dp_id] = outcomes[i].error;
      continue;
    }
    ResponseRecord rec = *outcomes[i].record;
    rec.sense = sense;
    rec.condition = std::string(to_string(condition));
    const auto normalized = matching::normalize(rec.raw_text);
    rec.normalized_text = normalized.value();
    if (cls) rec.mapped_label = matching::map_label(normalized, *lexicon);
    run.records.push_back(std::move(rec));
  }
  std::sort(run.records.begin(), run.records.end(),
            [](const ResponseRecord& a, const ResponseRecord& b) { return a.dp_id < b.dp_id; });
  m.finished_at = utc_timestamp();

  const std::string stem = run_stem(sense, condition, run_tag);
  const fs::path rel = fs::path("responses") / m.task_id / (stem + ".jsonl");
  std::string text;
  for (const auto& r : run.records) text += r.to_json().dump() + "\n";
  write_file(config_.run_dir / rel, text);
  record_manifest("runs", m.task_id + "/" + stem,
                  {{"manifest", m.to_json()},
                   {"responses", rel.generic_string()},
                   {"records", run.records.size()},
                   {"failures", run.failures},
                   {"skipped", run.skipped}});
  return run;
}

std::optional<CollectedRun> Pipeline::load_run(const std::string& task_id, const std::string& sense,
                                               Condition condition,
                                               const std::optional<std::string>& run_tag) const {
  const std::string stem = run_stem(sense, condition, run_tag);
  const fs::path file = config_.run_dir / "responses" / task_id / (stem + ".jsonl");
  if (!fs::exists(file)) return std::nullopt;
  CollectedRun run;
  run.manifest.task_id = task_id;
  run.manifest.sense = sense;
  run.manifest.condition = condition;
  const fs::path mpath = config_.run_dir / "manifest.json";
  if (fs::exists(mpath)) {
    const json mj = read_json_file(mpath);
    const std::string key = task_id + "/" + stem;
    if (mj.contains("runs") && mj.at("runs").contains(key)) {
      const auto& e = mj.at("runs").at(key);
      run.manifest = RunManifest::from_json(e.at("manifest"));
      run.failures = e.value("failures", std::map<std::string, std::string>());
      run.skipped = e.value("skipped", std::size_t{0});
    }
  }
  std::ifstream in(file, std::ios::binary);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      run.records.push_back(ResponseRecord::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw LoadError(file.string() + ": " + e.what(), n);
    }
  }
  return run;
}

void Pipeline::collect_all() {
  for (const auto& tc : config_.tasks) {
    const Task t = task(tc.id);
    collect(t, "en", Condition::full);
    if (config_.baseline) run_id_baseline(t);
    for (const auto& s : senses_for(t)) {
      if (!make_sense(t, s, Condition::full).usable) continue;
      collect(t, s, Condition::full);
    }
  }
}

double Pipeline::run_id_baseline(const Task& task) {
  const auto a = collect(task, "id", Condition::id_baseline, "a");
  const auto b = collect(task, "id", Condition::id_baseline, "b");
  auto ra = score_records(task, a.records, "en", ScoringMode::exact);
  auto rb = score_records(task, b.records, "en", ScoringMode::exact);
  align(ra, rb);
  if (ra.items.empty()) throw DegenerateError(task.spec.task_id + ": id baseline has no aligned pairs");
  return metrics::consistency(ra, rb, task);
}

void Pipeline::ablate() {
  for (const auto& tc : config_.tasks) {
    const Task t = task(tc.id);
    for (const auto& s : senses_for(t)) {
      for (auto c : conditions_for(t)) {
        if (c == Condition::full) continue;
        if (!make_sense(t, s, c).usable) continue;
        collect(t, s, c);
      }
      const auto spec = sensegen::SenseSpec::parse(s);
      if (!config_.reference_swap || !t.spec.benchmark || spec.method != sensegen::Method::translation) continue;
      const auto refs = references_for(tc.id);
      if (refs && covers(*refs, spec.target) && make_sense(t, s, Condition::full).usable)
        collect(t, s, Condition::reference_swap);
    }
  }
}

namespace {

std::optional<AlignedPair> aligned_pair(const Pipeline& p, const Task& task, const std::string& sense,
                                        Condition condition, ScoringMode mode) {
  const bool baseline = condition == Condition::id_baseline;
  const auto src = baseline ? p.load_run(task.spec.task_id, "id", condition, "a")
                            : p.load_run(task.spec.task_id, "en", Condition::full);
  const auto alt = baseline ? p.load_run(task.spec.task_id, "id", condition, "b")
                            : p.load_run(task.spec.task_id, sense, condition);
  if (!src || !alt) return std::nullopt;
  AlignedPair out{score_records(task, src->records, "en", mode),
                  score_records(task, alt->records, lexicon_sense(sense, condition), mode), 0};
  out.source.manifest = src->manifest;
  out.alt.manifest = alt->manifest;
  align(out.source, out.alt);
  out.excluded = task.active().size() - out.source.items.size();
  return out;
}

}  // namespace

std::optional<report::Row> Pipeline::compare(const Task& task, const std::string& sense, Condition condition,
                                             const std::optional<double>& baseline) {
  const std::string& tid = task.spec.task_id;
  report::Row row;
  row.task_id = tid;
  row.sense = condition == Condition::id_baseline ? "id" : sense;
  row.condition = std::string(to_string(condition));

  std::optional<sensegen::SensedTask> sensed;
  if (!is_identity(row.sense)) {
    sensed = load_sense(tid, sense, condition == Condition::reference_swap ? Condition::full : condition);
    if (sensed && !sensed->usable) {
      row.usable = false;
      row.note = sensed->note.empty() ? "sense unusable" : sensed->note;
      row.excluded = task.active().size();
      row.id_baseline = baseline;
      return row;
    }
  }

  auto pair = aligned_pair(*this, task, sense, condition, ScoringMode::exact);
  if (!pair) return std::nullopt;
  row.n = pair->source.items.size();
  row.excluded = pair->excluded;
  if (condition != Condition::id_baseline) row.id_baseline = baseline;
  if (row.n == 0) {
    row.note = "no aligned datapoints";
    return row;
  }

  row.acc_source = metrics::accuracy(pair->source);
  row.acc_sense = metrics::accuracy(pair->alt);
  const auto flags = metrics::pairwise_consistency(pair->source, pair->alt, task);
  const auto k = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  row.consistency = metrics::wilson(k, row.n);
  row.upper_bound = metrics::upper_bound(row.acc_source->value, row.acc_sense->value);
  const auto cond = metrics::conditional_consistency(pair->source, pair->alt, task);
  row.given_correct = cond.given_correct();
  row.given_incorrect = cond.given_incorrect();
  if (task.spec.kind == TaskKind::Classification) {
    row.unmapped_source = metrics::unmapped_rate(pair->source);
    row.unmapped_sense = metrics::unmapped_rate(pair->alt);
  } else {
    if (config_.scoring.containment) {
      if (auto c = aligned_pair(*this, task, sense, condition, ScoringMode::containment)) {
        row.acc_source_containment = metrics::accuracy(c->source).value;
        row.acc_sense_containment = metrics::accuracy(c->alt).value;
      }
    }
    if (config_.scoring.extract_numeric && task.spec.numeric_answer) {
      if (auto x = aligned_pair(*this, task, sense, condition, ScoringMode::extract_numeric)) {
        row.acc_source_extracted = metrics::accuracy(x->source).value;
        row.acc_sense_extracted = metrics::accuracy(x->alt).value;
        row.consistency_extracted = metrics::consistency(x->source, x->alt, task);
      }
    }
  }

  if (sensed && condition == Condition::full) {
    std::size_t checked = 0, valid = 0;
    for (const auto& item : pair->alt.items) {
      const auto* e = sensed->find(item.dp_id);
      if (e && e->numbers_valid) {
        ++checked;
        valid += *e->numbers_valid ? 1 : 0;
      }
    }
    if (checked) row.number_translation_accuracy = static_cast<double>(valid) / static_cast<double>(checked);

    if (sensed->sense.method == sensegen::Method::translation) {
      if (auto refs = references_for(tid)) {
        std::vector<std::string> hyps, ref_texts;
        for (const auto& item : pair->alt.items) {
          const auto* e = sensed->find(item.dp_id);
          auto r = refs->find({item.dp_id, sensed->sense.target});
          if (!e || r == refs->end()) continue;
          hyps.push_back(join_variable(task.spec, e->components));
          ref_texts.push_back(join_variable(task.spec, r->second));
        }
        if (!hyps.empty()) row.quality = mtquality::score_corpus(hyps, ref_texts);
      }
    }

    if (auto ns = config_.neural_scores.find(tid + "/" + sense); ns != config_.neural_scores.end()) {
      const auto scores = mtquality::import_neural_scores(ns->second).scores;
      std::vector<metrics::PairOutcome> outcomes;
      double sum = 0;
      std::size_t scored = 0;
      for (std::size_t i = 0; i < flags.size(); ++i) {
        const auto& id = pair->source.items[i].dp_id;
        outcomes.push_back({id, flags[i]});
        if (auto s = scores.find(id); s != scores.end()) {
          sum += s->second;
          ++scored;
        }
      }
      if (scored) row.neural_mean = sum / static_cast<double>(scored);
      const auto f = metrics::filter_by_quality(outcomes, scores, config_.scoring.quality_threshold);
      row.filtered_consistency = f.consistency_kept;
      row.filtered_n = f.kept.size();
      row.filtered_delta = f.delta;
    }
  }
  return row;
}

std::vector<report::Row> Pipeline::score() {
  std::vector<report::Row> rows;
  for (const auto& tc : config_.tasks) {
    const Task t = task(tc.id);
    std::optional<double> baseline;
    if (config_.baseline) {
      if (auto r = compare(t, "id", Condition::id_baseline, std::nullopt)) {
        if (r->consistency) baseline = r->consistency->value;
        rows.push_back(std::move(*r));
      }
    }
    for (const auto& s : senses_for(t)) {
      for (auto c : conditions_for(t))
        if (auto r = compare(t, s, c, baseline)) rows.push_back(std::move(*r));
      if (config_.reference_swap)
        if (auto r = compare(t, s, Condition::reference_swap, baseline)) rows.push_back(std::move(*r));
    }
  }
  report::sort_rows(rows);
  return rows;
}

json Pipeline::analyze_conditional() {
  json out = json::array();
  for (const auto& tc : config_.tasks) {
    const Task t = task(tc.id);
    for (const auto& s : senses_for(t)) {
      for (auto c : conditions_for(t)) {
        auto pair = aligned_pair(*this, t, s, c, ScoringMode::exact);
        if (!pair || pair->source.items.empty()) continue;
        const auto cc = metrics::conditional_consistency(pair->source, pair->alt, t);
        out.push_back({{"task_id", tc.id},
                       {"sense", s},
                       {"condition", std::string(to_string(c))},
                       {"n", cc.n},
                       {"n_correct", cc.n_correct},
                       {"consistent", cc.consistent},
                       {"consistent_given_correct", cc.consistent_given_correct},
                       {"consistent_given_incorrect", cc.consistent_given_incorrect},
                       {"overall", report::round6(cc.overall())},
                       {"source_accuracy", report::round6(cc.source_accuracy())},
                       {"given_correct", cc.given_correct() ? json(report::round6(*cc.given_correct())) : json()},
                       {"given_incorrect",
                        cc.given_incorrect() ? json(report::round6(*cc.given_incorrect())) : json()}});
      }
    }
  }
  return out;
}

json Pipeline::analyze_matched_language() {
  json out = json::array();
  for (const auto& tc : config_.tasks) {
    if (tc.id != "writers" && tc.id != "companies") continue;
    const Task t = task(tc.id);
    json entry{{"task_id", tc.id}};
    metrics::AccuracyMatrix acc;
    std::string missing;
    for (Language prompt : kAllLanguages) {
      const std::string sense = prompt == Language::en ? "en" : std::string(to_code(prompt)) + "^T";
      const auto run = load_run(tc.id, sense, Condition::full);
      if (!run) {
        missing = "no run for " + sense;
        break;
      }
      const auto scored = score_records(t, run->records, lexicon_sense(sense, Condition::full), ScoringMode::exact);
      std::map<Language, std::pair<std::size_t, std::size_t>> cells;  // tag -> (correct, n)
      for (const auto& item : scored.items) {
        const auto* dp = t.find(item.dp_id);
        if (!dp->subset_tag) continue;
        auto& c = cells[*dp->subset_tag];
        c.first += item.correct ? 1 : 0;
        ++c.second;
      }
      for (const auto& [tag, c] : cells)
        acc[prompt][tag] = static_cast<double>(c.first) / static_cast<double>(c.second);
    }
    try {
      if (!missing.empty()) throw ConfigError(missing);
      const auto ml = metrics::matched_language_analysis(acc);
      json matrix = json::object(), deviation = json::object();
      for (const auto& [row, cols] : acc)
        for (const auto& [col, v] : cols) matrix[std::string(to_code(row))][std::string(to_code(col))] = report::round6(v);
      for (const auto& [row, cols] : ml.deviation)
        for (const auto& [col, v] : cols)
          deviation[std::string(to_code(row))][std::string(to_code(col))] = report::round6(v);
      entry["accuracy"] = matrix;
      entry["deviation"] = deviation;
      auto rounded = [](std::vector<double> v) {
        for (auto& x : v) x = report::round6(x);
        return v;
      };
      entry["matched"] = rounded(ml.matched);
      entry["mismatched"] = rounded(ml.mismatched);
      entry["t_test"] = ml.test ? json{{"t", report::round6(ml.test->t)},
                                       {"p", report::round6(ml.test->p)},
                                       {"df", report::round6(ml.test->df)}}
                                : json();
    } catch (const ConfigError& e) {
      entry["error"] = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

json Pipeline::analyze_correlation() {
  json out = json::array();
  for (const auto& [key, path] : config_.neural_scores) {
    const auto slash = key.find('/');
    if (slash == std::string::npos) throw ConfigError("neural score key '" + key + "' is not task/sense");
    const std::string tid = key.substr(0, slash), sense = key.substr(slash + 1);
    const Task t = task(tid);
    auto pair = aligned_pair(*this, t, sense, Condition::full, ScoringMode::exact);
    json entry{{"task_id", tid}, {"sense", sense}};
    if (!pair) {
      entry["error"] = "runs missing";
      out.push_back(std::move(entry));
      continue;
    }
    const auto flags = metrics::pairwise_consistency(pair->source, pair->alt, t);
    const auto scores = mtquality::import_neural_scores(path).scores;
    std::vector<double> xs, ys, good, bad;
    for (std::size_t i = 0; i < flags.size(); ++i) {
      auto s = scores.find(pair->source.items[i].dp_id);
      if (s == scores.end()) continue;
      xs.push_back(flags[i] ? 1.0 : 0.0);
      ys.push_back(s->second);
      (flags[i] ? good : bad).push_back(s->second);
    }
    entry["n"] = xs.size();
    try {
      entry["pearson"] = report::round6(metrics::pearson(xs, ys));
    } catch (const Error&) {
      entry["pearson"] = nullptr;
    }
    try {
      const auto tt = metrics::welch_t_test(good, bad);
      entry["t_test"] = {{"t", report::round6(tt.t)}, {"p", report::round6(tt.p)}, {"df", report::round6(tt.df)}};
    } catch (const DegenerateError&) {
      entry["t_test"] = nullptr;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

json Pipeline::analyze_quality(bool write_bridge) {
  json out = json::array();
  for (const auto& tc : config_.tasks) {
    auto refs = references_for(tc.id);
    if (!refs) continue;
    const Task t = task(tc.id);
    for (const auto& s : senses_for(t)) {
      const auto sensed = load_sense(tc.id, s, Condition::full);
      if (!sensed || !sensed->usable || sensed->sense.method != sensegen::Method::translation ||
          !covers(*refs, sensed->sense.target))
        continue;
      std::vector<mtquality::BridgeRecord> bridge;
      std::vector<std::string> hyps, refs_text;
      for (const Datapoint* dp : t.active()) {
        const auto* e = sensed->find(dp->dp_id);
        auto r = refs->find({dp->dp_id, sensed->sense.target});
        if (!e || e->failure || r == refs->end()) continue;
        bridge.push_back({dp->dp_id, join_variable(t.spec, dp->fields), join_variable(t.spec, e->components),
                          join_variable(t.spec, r->second)});
        hyps.push_back(bridge.back().mt);
        refs_text.push_back(bridge.back().ref);
      }
      json entry{{"task_id", tc.id}, {"sense", s}, {"segments", hyps.size()}};
      if (!hyps.empty()) {
        const auto q = mtquality::score_corpus(hyps, refs_text);
        entry["bleu"] = report::round6(q.bleu);
        entry["rouge1"] = report::round6(q.rouge1);
        entry["rouge2"] = report::round6(q.rouge2);
        entry["rouge_l"] = report::round6(q.rouge_l);
      }
      if (write_bridge && !bridge.empty()) {
        const fs::path p = reports_dir() / "bridge" / (tc.id + "__" + s + ".jsonl");
        fs::create_directories(p.parent_path());
        mtquality::write_bridge_input(p, bridge);
        entry["bridge_input"] = fs::relative(p, config_.run_dir).generic_string();
      }
      out.push_back(std::move(entry));
    }
  }
  return out;
}

std::vector<report::Row> Pipeline::run() {
  generate_data();
  make_senses();
  collect_all();
  ablate();
  auto rows = score();
  report::emit(rows, reports_dir(), {report::Format::json, report::Format::csv, report::Format::svg});
  write_file(reports_dir() / "conditional.json", analyze_conditional().dump(2) + "\n");
  write_file(reports_dir() / "matched_language.json", analyze_matched_language().dump(2) + "\n");
  write_file(reports_dir() / "correlation.json", analyze_correlation().dump(2) + "\n");
  write_file(reports_dir() / "quality.json", analyze_quality(true).dump(2) + "\n");
  return rows;
}

}  // namespace senseprobe::pipeline
