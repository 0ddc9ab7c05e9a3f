#include "senseprobe/records.hpp"

#include <chrono>
#include <ctime>

#include "senseprobe/errors.hpp"

namespace senseprobe {

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case Condition::full: return "full";
    case Condition::I: return "I";
    case Condition::X: return "X";
    case Condition::id_baseline: return "id-baseline";
    case Condition::reference_swap: return "reference-swap";
  }
  return "full";
}

Condition parse_condition(std::string_view text) {
  for (auto c : {Condition::full, Condition::I, Condition::X, Condition::id_baseline,
                 Condition::reference_swap}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown condition '" + std::string(text) + "'");
}

std::string RunManifest::run_key() const {
  std::string key = task_id + "|" + sense + "|" + std::string(to_string(condition)) + "|" + model_id;
  if (nonce) key += "|" + *nonce;
  return key;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j = {{"task_id", task_id},
                      {"sense", sense},
                      {"condition", to_string(condition)},
                      {"model_id", model_id},
                      {"temperature", temperature},
                      {"max_tokens", max_tokens},
                      {"seed", seed},
                      {"use_cache", use_cache},
                      {"started_at", started_at},
                      {"finished_at", finished_at}};
  j["nonce"] = nonce ? nlohmann::json(*nonce) : nlohmann::json(nullptr);
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  m.task_id = j.at("task_id").get<std::string>();
  m.sense = j.at("sense").get<std::string>();
  m.condition = parse_condition(j.at("condition").get<std::string>());
  m.model_id = j.at("model_id").get<std::string>();
  m.temperature = j.at("temperature").get<double>();
  m.max_tokens = j.at("max_tokens").get<int>();
  m.seed = j.value("seed", std::uint64_t{0});
  m.use_cache = j.value("use_cache", true);
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  if (j.contains("nonce") && !j["nonce"].is_null()) m.nonce = j["nonce"].get<std::string>();
  return m;
}

nlohmann::json ResponseRecord::to_json() const {
  nlohmann::json j = {{"request_hash", request_hash}, {"raw_text", raw_text},
                      {"normalized_text", normalized_text}, {"dp_id", dp_id},
                      {"sense", sense}, {"condition", condition},
                      {"timestamp", timestamp}, {"from_cache", from_cache}};
  j["mapped_label"] = mapped_label ? nlohmann::json(*mapped_label) : nlohmann::json(nullptr);
  return j;
}

ResponseRecord ResponseRecord::from_json(const nlohmann::json& j) {
  ResponseRecord r;
  r.request_hash = j.at("request_hash").get<std::string>();
  r.raw_text = j.at("raw_text").get<std::string>();
  r.normalized_text = j.value("normalized_text", "");
  r.dp_id = j.at("dp_id").get<std::string>();
  r.sense = j.value("sense", "");
  r.condition = j.value("condition", "");
  r.timestamp = j.value("timestamp", "");
  r.from_cache = j.value("from_cache", false);
  if (j.contains("mapped_label") && !j["mapped_label"].is_null()) {
    r.mapped_label = j["mapped_label"].get<std::string>();
  }
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace senseprobe
