#include "senseprobe/modelclient.hpp"

#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "senseprobe/errors.hpp"
#include "senseprobe/rng.hpp"

namespace senseprobe::modelclient {

void CompletionRequest::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must be in [0, 2]");
  if (prompt.empty()) throw ConfigError("empty prompt");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

nlohmann::json hash_payload(const CompletionRequest& req) {
  nlohmann::json j = {{"max_tokens", req.max_tokens},
                      {"model_id", req.model_id},
                      {"prompt", req.prompt},
                      {"temperature", req.temperature}};
  if (req.nonce) j["nonce"] = *req.nonce;
  return j;
}

std::string dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ResponseRecord make_record(const CompletionRequest& req, std::string raw) {
  ResponseRecord r;
  r.request_hash = request_hash(req);
  r.raw_text = std::move(raw);
  r.dp_id = req.dp_id;
  r.sense = req.sense;
  r.condition = req.condition;
  r.timestamp = utc_timestamp();
  return r;
}

}  // namespace

std::string request_hash(const CompletionRequest& req) { return sha256_hex(dump(hash_payload(req))); }

ResponseCache::ResponseCache(std::filesystem::path dir) : file_(std::move(dir) / "responses.jsonl") {
  std::filesystem::create_directories(file_.parent_path());
  std::ifstream in(file_, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      index_[j.at("request_hash").get<std::string>()] =
          Entry{j.at("raw_text").get<std::string>(), j.value("timestamp", "")};
    } catch (const nlohmann::json::exception&) {
      ++skipped_;  // torn write from an interrupted run
    }
  }
}

std::optional<ResponseCache::Entry> ResponseCache::lookup(const std::string& hash) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(hash);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ResponseCache::store(const CompletionRequest& req, const std::string& hash, const Entry& entry) {
  nlohmann::json j = hash_payload(req);
  j["request_hash"] = hash;
  j["raw_text"] = entry.raw_text;
  j["timestamp"] = entry.timestamp;
  const std::string line = dump(j) + "\n";

  std::lock_guard lock(mutex_);
  if (index_.count(hash)) return;
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  out << line;
  out.flush();
  if (!out) throw Error("cannot append to " + file_.string());
  index_.emplace(hash, entry);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return index_.size();
}

CachedClient::CachedClient(std::shared_ptr<Client> inner, std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

ResponseRecord CachedClient::complete(const CompletionRequest& req) {
  req.validate();
  const std::string hash = request_hash(req);
  if (auto hit = cache_->lookup(hash)) {
    ResponseRecord r;
    r.request_hash = hash;
    r.raw_text = hit->raw_text;
    r.dp_id = req.dp_id;
    r.sense = req.sense;
    r.condition = req.condition;
    r.timestamp = hit->timestamp;
    r.from_cache = true;
    return r;
  }
  ResponseRecord r = inner_->complete(req);
  r.request_hash = hash;
  cache_->store(req, hash, {r.raw_text, r.timestamp});
  return r;
}

RateLimiter::RateLimiter(double requests_per_second) {
  if (requests_per_second > 0) {
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / requests_per_second));
  }
}

void RateLimiter::acquire() {
  if (interval_ == std::chrono::steady_clock::duration::zero()) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

HttpChatClient::HttpChatClient(HttpConfig config)
    : config_(std::move(config)),
      limiter_(config_.requests_per_second),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  if (config_.api_key.empty()) {
    if (const char* key = std::getenv("SENSEPROBE_API_KEY")) config_.api_key = key;
  }
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base URL needs a scheme: " + config_.base_url);
  const auto path_start = config_.base_url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.base_url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

void HttpChatClient::set_sleeper(std::function<void(std::chrono::milliseconds)> sleeper) {
  sleep_ = std::move(sleeper);
}

ResponseRecord HttpChatClient::complete(const CompletionRequest& req) {
  req.validate();
  const nlohmann::json body = {
      {"model", req.model_id.empty() ? config_.model : req.model_id},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})},
      {"temperature", req.temperature},
      {"max_tokens", req.max_tokens}};
  const std::string payload = dump(body);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  int last_status = 0;
  auto backoff = config_.initial_backoff;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      sleep_(backoff);
      backoff *= 2;
    }
    limiter_.acquire();
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(config_.timeout);
    cli.set_read_timeout(config_.timeout);
    cli.set_write_timeout(config_.timeout);
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    last_status = res->status;
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw PermanentError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500),
                           res->status);
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      return make_record(req, content.is_null() ? std::string() : content.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw PermanentError(std::string("malformed completion response: ") + e.what(), res->status);
    }
  }
  throw TransportError("giving up after " + std::to_string(config_.retries + 1) +
                           " attempts: " + last_error,
                       last_status);
}

FunctionModel::FunctionModel(Fn fn) : fn_(std::move(fn)) {}

ResponseRecord FunctionModel::complete(const CompletionRequest& req) {
  req.validate();
  return make_record(req, fn_(req));
}

std::shared_ptr<Client> scripted_model(std::map<std::string, std::string> replies,
                                       std::optional<std::string> fallback) {
  return std::make_shared<FunctionModel>(
      [replies = std::move(replies), fallback = std::move(fallback)](const CompletionRequest& req) {
        auto it = replies.find(req.prompt);
        if (it != replies.end()) return it->second;
        if (fallback) return *fallback;
        throw LookupError("scripted model has no reply for prompt: " + req.prompt.substr(0, 80));
      });
}

std::shared_ptr<Client> fact_oracle_model(std::map<std::string, std::string> table) {
  return std::make_shared<FunctionModel>([table = std::move(table)](const CompletionRequest& req) {
    auto it = table.find(req.dp_id);
    if (it == table.end()) throw LookupError("fact table has no entry for " + req.dp_id);
    return it->second;
  });
}

std::shared_ptr<Client> form_tied_model(std::map<std::string, std::map<std::string, std::string>> tables) {
  return std::make_shared<FunctionModel>([tables = std::move(tables)](const CompletionRequest& req) {
    auto t = tables.find(req.sense);
    if (t == tables.end()) throw LookupError("no table for sense " + req.sense);
    auto it = t->second.find(req.dp_id);
    if (it == t->second.end()) throw LookupError("sense " + req.sense + " has no entry for " + req.dp_id);
    return it->second;
  });
}

std::shared_ptr<Client> random_choice_model(std::vector<std::string> labels, std::uint64_t seed) {
  if (labels.empty()) throw ConfigError("random choice model needs labels");
  return std::make_shared<FunctionModel>([labels = std::move(labels), seed](const CompletionRequest& req) {
    std::uint64_t h = fnv1a64(req.dp_id.data(), req.dp_id.size(), seed ^ 0xcbf29ce484222325ULL);
    if (req.nonce) h = fnv1a64(req.nonce->data(), req.nonce->size(), h);
    h = fnv1a64(req.prompt.data(), req.prompt.size(), h);
    SplitMix64 rng(h);
    return labels[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(labels.size()) - 1))];
  });
}

std::shared_ptr<Client> echo_model() {
  return std::make_shared<FunctionModel>([](const CompletionRequest& req) {
    const auto nl = req.prompt.find('\n');
    return nl == std::string::npos ? req.prompt : req.prompt.substr(nl + 1);
  });
}

}  // namespace senseprobe::modelclient
