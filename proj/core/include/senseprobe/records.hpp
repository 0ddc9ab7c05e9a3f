#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace senseprobe {

/// Ablation condition of a collected run.
enum class Condition { full, I, X, id_baseline, reference_swap };

std::string_view to_string(Condition c) noexcept;
/// Accepts "full", "I", "X", "id-baseline", "reference-swap".
Condition parse_condition(std::string_view text);

/// Immutable description of one collection run.
struct RunManifest {
  std::string task_id;
  std::string sense;  // "id", "en", "en^P", "de^T", ...
  Condition condition = Condition::full;
  std::string model_id;
  double temperature = 0.2;
  int max_tokens = 256;
  std::uint64_t seed = 0;
  std::optional<std::string> nonce;  // set for runs that must not share cache entries
  bool use_cache = true;
  std::string started_at;
  std::string finished_at;

  /// (task, sense, condition, model, nonce) as one string.
  std::string run_key() const;
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// One model reply with its provenance.
struct ResponseRecord {
  std::string request_hash;
  std::string raw_text;
  std::string normalized_text;
  std::optional<std::string> mapped_label;
  std::string dp_id;
  std::string sense;
  std::string condition;
  std::string timestamp;
  bool from_cache = false;

  nlohmann::json to_json() const;
  static ResponseRecord from_json(const nlohmann::json& j);
};

/// UTC time as "2024-05-01T12:00:00Z".
std::string utc_timestamp();

}  // namespace senseprobe
