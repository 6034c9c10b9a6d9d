#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/errors.hpp"

namespace clinichat::gateway {

enum class MessageRole { system, user, assistant };

const char* to_string(MessageRole r);

struct ChatMessage {
  MessageRole role;
  std::string text;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 2048;
  // Free-form accounting label, e.g. "recon.knowledge". Not part of the
  // request fingerprint.
  std::string tag;

  ChatRequest& add(MessageRole role, std::string text) {
    messages.push_back({role, std::move(text)});
    return *this;
  }
  const std::string& last_user_text() const;
};

struct TokenUsage {
  long prompt = 0;
  long completion = 0;
};

struct ChatResponse {
  std::string text;
  TokenUsage usage;
  long latency_ms = 0;
  std::string provider;
};

// Stable hash over (model_id, messages, temperature, max_output_tokens).
// Computed from the typed request, so it is independent of how a request
// happened to be serialized.
std::string fingerprint(const ChatRequest& req);

void to_json(nlohmann::json& j, const ChatResponse& r);
void from_json(const nlohmann::json& j, ChatResponse& r);

enum class CassetteMode { record, replay, passthrough };

CassetteMode cassette_mode_from_string(const std::string& s);
const char* to_string(CassetteMode m);

/// Recorded request/response store for deterministic offline runs.
///
/// File format: JSON lines, one {fingerprint, request_digest, response}
/// object per line, append-only in record mode. Repeated recordings under
/// the same fingerprint replay in recorded order, which is what makes
/// legitimate re-prompts of an identical request reproducible.
class Cassette {
 public:
  // path may be empty for an in-memory cassette (tests, passthrough runs).
  Cassette(CassetteMode mode, std::string path = "");

  CassetteMode mode() const { return mode_; }
  const std::string& path() const { return path_; }

  // Replay-mode lookup; advances the per-fingerprint cursor.
  std::optional<ChatResponse> next_replay(const std::string& fp);

  void record(const std::string& fp, const ChatRequest& req, const ChatResponse& resp);

  size_t entry_count() const;

 private:
  CassetteMode mode_;
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, std::deque<ChatResponse>> entries_;
  std::map<std::string, size_t> cursors_;
  size_t total_ = 0;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

struct HttpProviderConfig {
  std::string name = "openai";
  std::string base_url;           // e.g. "https://api.openai.com"
  std::string chat_path = "/v1/chat/completions";
  std::string api_key_env;        // env var holding the bearer token
  int timeout_seconds = 120;
};

// OpenAI-style chat-completions client. The key is read from the
// environment at call time; configs never hold secrets.
std::shared_ptr<ChatProvider> make_http_provider(const HttpProviderConfig& cfg);

// Dispatches to a provider by requested model id.
class RoutingProvider : public ChatProvider {
 public:
  void route(const std::string& model_id, std::shared_ptr<ChatProvider> provider);
  void set_default(std::shared_ptr<ChatProvider> provider) { default_ = std::move(provider); }
  std::string name() const override { return "router"; }
  ChatResponse complete(const ChatRequest& req) override;

 private:
  std::map<std::string, std::shared_ptr<ChatProvider>> routes_;
  std::shared_ptr<ChatProvider> default_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{1000};
  double multiplier = 2.0;
};

struct UsageEvent {
  std::string tag;
  std::string model_id;
  TokenUsage usage;
};

/// Shared front door for every model call in the pipeline.
///
/// Applies the cassette mode (replay never touches the network), retries
/// transient provider failures with exponential backoff, bounds the number
/// of in-flight provider calls, and keeps a usage log for cost accounting.
/// Safe to share across worker threads.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> provider, std::shared_ptr<Cassette> cassette,
          RetryPolicy retry = {}, int max_in_flight = 4);

  ChatResponse chat(const ChatRequest& req);

  const Cassette& cassette() const { return *cassette_; }
  std::vector<UsageEvent> usage_log() const;
  size_t call_count() const;
  // Calls matching a tag prefix, e.g. "evalx.".
  size_t call_count(const std::string& tag_prefix) const;

 private:
  ChatResponse call_with_retries(const ChatRequest& req);

  std::shared_ptr<ChatProvider> provider_;
  std::shared_ptr<Cassette> cassette_;
  RetryPolicy retry_;
  int max_in_flight_;
  mutable std::mutex mu_;
  int in_flight_ = 0;
  std::condition_variable_any slot_free_;
  std::vector<UsageEvent> usage_;
};

struct PriceEntry {
  double prompt_per_1k = 0.0;
  double completion_per_1k = 0.0;
};

class CostModel {
 public:
  void set_price(const std::string& model_id, PriceEntry price);
  bool has(const std::string& model_id) const;
  const PriceEntry& price(const std::string& model_id) const;  // throws UnknownModel
  bool empty() const { return prices_.empty(); }

 private:
  std::map<std::string, PriceEntry> prices_;
};

struct CostBreakdown {
  std::map<std::string, double> per_tag;
  std::map<std::string, double> per_model;
  double total = 0.0;
};

// Totals = sum of tokens x price, grouped by tag and by model.
// Throws UnknownModel when the log mentions a model without a price.
CostBreakdown estimate_cost(std::span<const UsageEvent> log, const CostModel& model);

}  // namespace clinichat::gateway
