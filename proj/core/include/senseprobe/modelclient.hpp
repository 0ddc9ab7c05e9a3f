#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "senseprobe/records.hpp"

namespace senseprobe::modelclient {

inline constexpr double kDefaultTemperature = 0.2;
inline constexpr int kDefaultMaxTokens = 256;
inline constexpr int kDefaultRetries = 5;

struct CompletionRequest {
  std::string model_id;
  std::string prompt;
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;

  // Routing metadata. Only the nonce enters the request hash.
  std::string dp_id;
  std::string sense;
  std::string condition;
  std::string purpose;  // "answer" or "sense"
  std::optional<std::string> nonce;

  /// Throws ConfigError unless temperature is in [0, 2], the prompt is
  /// non-empty and max_tokens is positive.
  void validate() const;
};

/// Hex SHA-256 of the canonical JSON of (model_id, prompt, temperature,
/// max_tokens), plus the nonce when set.
std::string request_hash(const CompletionRequest& req);

class Client {
 public:
  virtual ~Client() = default;
  /// Fills request_hash, raw_text, dp_id, sense, condition, timestamp.
  virtual ResponseRecord complete(const CompletionRequest& req) = 0;
};

/// Append-only JSONL store of replies keyed by request hash, indexed in
/// memory on open. Lines that do not parse are skipped and counted.
/// Safe for concurrent use; writes are serialized.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  struct Entry {
    std::string raw_text;
    std::string timestamp;
  };

  std::optional<Entry> lookup(const std::string& hash) const;
  void store(const CompletionRequest& req, const std::string& hash, const Entry& entry);
  std::size_t size() const;
  std::size_t skipped_lines() const noexcept { return skipped_; }
  const std::filesystem::path& file() const noexcept { return file_; }

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Entry> index_;
  std::size_t skipped_ = 0;
};

/// Serves repeated requests from the cache; misses go to the wrapped client
/// and are persisted before returning.
class CachedClient final : public Client {
 public:
  CachedClient(std::shared_ptr<Client> inner, std::shared_ptr<ResponseCache> cache);
  ResponseRecord complete(const CompletionRequest& req) override;

 private:
  std::shared_ptr<Client> inner_;
  std::shared_ptr<ResponseCache> cache_;
};

/// Token bucket with capacity one: successive acquisitions are spaced at
/// least 1/rate apart. rate <= 0 disables limiting.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

struct HttpConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model;
  std::string api_key;  // empty: read SENSEPROBE_API_KEY
  int retries = kDefaultRetries;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
  double requests_per_second = 1.0;
};

/// OpenAI-compatible chat completion client: POST {base_url}/chat/completions
/// with a single user message. 429, 5xx and connection failures are retried
/// with exponential backoff; other 4xx raise PermanentError at once.
class HttpChatClient final : public Client {
 public:
  explicit HttpChatClient(HttpConfig config);
  ResponseRecord complete(const CompletionRequest& req) override;

  /// Replaces the backoff sleep (tests).
  void set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper);

 private:
  HttpConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  RateLimiter limiter_;
  std::function<void(std::chrono::milliseconds)> sleep_;
};

/// Reply computed by a function; the basis of the synthetic models.
class FunctionModel : public Client {
 public:
  using Fn = std::function<std::string(const CompletionRequest&)>;
  explicit FunctionModel(Fn fn);
  ResponseRecord complete(const CompletionRequest& req) override;

 private:
  Fn fn_;
};

/// prompt -> reply table. Unknown prompts get `fallback`, or LookupError.
std::shared_ptr<Client> scripted_model(std::map<std::string, std::string> replies,
                                       std::optional<std::string> fallback = std::nullopt);

/// Answers from dp_id -> answer, whatever the prompt says.
std::shared_ptr<Client> fact_oracle_model(std::map<std::string, std::string> table);

/// Answers from the table of the request's sense label.
std::shared_ptr<Client> form_tied_model(std::map<std::string, std::map<std::string, std::string>> tables);

/// Uniform choice among `labels`, seeded by (seed, nonce, dp_id, prompt).
std::shared_ptr<Client> random_choice_model(std::vector<std::string> labels, std::uint64_t seed);

/// Replies with everything after the first newline of the prompt (the text
/// a generation prompt asks to transform), so senses equal their source.
std::shared_ptr<Client> echo_model();

/// Runs fn(items[i]) for every i with at most `max_in_flight` calls active;
/// results keep input order. The first exception is rethrown after all
/// workers stop.
template <typename T, typename R>
std::vector<R> bounded_map(const std::vector<T>& items, std::size_t max_in_flight,
                           const std::function<R(const T&)>& fn);

}  // namespace senseprobe::modelclient

#include "senseprobe/detail/bounded_map.hpp"
