#include "clinichat/gateway.hpp"

#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <thread>

#include "clinichat/text.hpp"

namespace clinichat::gateway {

const char* to_string(MessageRole r) {
  switch (r) {
    case MessageRole::system: return "system";
    case MessageRole::user: return "user";
    case MessageRole::assistant: return "assistant";
  }
  return "user";
}

const std::string& ChatRequest::last_user_text() const {
  static const std::string empty;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == MessageRole::user) return it->text;
  }
  return empty;
}

std::string fingerprint(const ChatRequest& req) {
  char num[64];
  std::snprintf(num, sizeof(num), "%.17g|%d", req.temperature, req.max_output_tokens);
  std::string canon = "m=" + req.model_id + "\x1f" + num;
  for (const auto& m : req.messages) {
    canon += '\x1f';
    canon += to_string(m.role);
    canon += ':';
    canon += m.text;
  }
  return text::fnv1a64_hex(canon);
}

void to_json(nlohmann::json& j, const ChatResponse& r) {
  j = nlohmann::json{{"text", r.text},
                     {"prompt_tokens", r.usage.prompt},
                     {"completion_tokens", r.usage.completion},
                     {"latency_ms", r.latency_ms},
                     {"provider", r.provider}};
}

void from_json(const nlohmann::json& j, ChatResponse& r) {
  r.text = j.at("text").get<std::string>();
  r.usage.prompt = j.value("prompt_tokens", 0L);
  r.usage.completion = j.value("completion_tokens", 0L);
  r.latency_ms = j.value("latency_ms", 0L);
  r.provider = j.value("provider", "");
}

CassetteMode cassette_mode_from_string(const std::string& s) {
  if (s == "record") return CassetteMode::record;
  if (s == "replay") return CassetteMode::replay;
  if (s == "passthrough") return CassetteMode::passthrough;
  throw Error(ErrorKind::config_error, "unknown cassette mode: " + s);
}

const char* to_string(CassetteMode m) {
  switch (m) {
    case CassetteMode::record: return "record";
    case CassetteMode::replay: return "replay";
    case CassetteMode::passthrough: return "passthrough";
  }
  return "passthrough";
}

Cassette::Cassette(CassetteMode mode, std::string path) : mode_(mode), path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) {
    if (mode_ == CassetteMode::replay) {
      throw Error(ErrorKind::config_error, "cassette file not found: " + path_);
    }
    return;
  }
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::config_error,
                  path_ + ":" + std::to_string(lineno) + ": bad cassette line: " + e.what());
    }
    auto fp = j.at("fingerprint").get<std::string>();
    entries_[fp].push_back(j.at("response").get<ChatResponse>());
    ++total_;
  }
}

std::optional<ChatResponse> Cassette::next_replay(const std::string& fp) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(fp);
  if (it == entries_.end()) return std::nullopt;
  size_t& cursor = cursors_[fp];
  if (cursor >= it->second.size()) return std::nullopt;
  return it->second[cursor++];
}

void Cassette::record(const std::string& fp, const ChatRequest& req, const ChatResponse& resp) {
  std::lock_guard lock(mu_);
  entries_[fp].push_back(resp);
  ++total_;
  if (path_.empty()) return;
  std::string last_user = req.last_user_text();
  nlohmann::json digest{{"model_id", req.model_id},
                        {"tag", req.tag},
                        {"messages", req.messages.size()},
                        {"head", last_user.substr(0, 80)}};
  nlohmann::json line{{"fingerprint", fp}, {"request_digest", digest}, {"response", resp}};
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::config_error, "cannot append to cassette: " + path_);
  out << line.dump() << '\n';
}

size_t Cassette::entry_count() const {
  std::lock_guard lock(mu_);
  return total_;
}

void RoutingProvider::route(const std::string& model_id, std::shared_ptr<ChatProvider> provider) {
  routes_[model_id] = std::move(provider);
}

ChatResponse RoutingProvider::complete(const ChatRequest& req) {
  auto it = routes_.find(req.model_id);
  if (it != routes_.end()) return it->second->complete(req);
  if (default_) return default_->complete(req);
  throw Error(ErrorKind::provider_error, "no provider routes model '" + req.model_id + "'");
}

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, std::shared_ptr<Cassette> cassette,
                 RetryPolicy retry, int max_in_flight)
    : provider_(std::move(provider)),
      cassette_(std::move(cassette)),
      retry_(retry),
      max_in_flight_(max_in_flight > 0 ? max_in_flight : 1) {
  if (!cassette_) cassette_ = std::make_shared<Cassette>(CassetteMode::passthrough);
}

ChatResponse Gateway::chat(const ChatRequest& req) {
  if (req.messages.empty()) throw std::invalid_argument("chat request has no messages");
  if (req.messages.front().role == MessageRole::assistant) {
    throw std::invalid_argument("chat request must start with a system or user message");
  }
  if (req.temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");

  const std::string fp = fingerprint(req);
  ChatResponse resp;
  switch (cassette_->mode()) {
    case CassetteMode::replay: {
      auto hit = cassette_->next_replay(fp);
      if (!hit) {
        throw Error(ErrorKind::replay_miss,
                    "no recorded response for fingerprint " + fp + " (tag " + req.tag + ")");
      }
      resp = *hit;
      break;
    }
    case CassetteMode::record:
      resp = call_with_retries(req);
      cassette_->record(fp, req, resp);
      break;
    case CassetteMode::passthrough:
      resp = call_with_retries(req);
      break;
  }

  {
    std::lock_guard lock(mu_);
    usage_.push_back({req.tag, req.model_id, resp.usage});
  }
  return resp;
}

ChatResponse Gateway::call_with_retries(const ChatRequest& req) {
  if (!provider_) {
    throw Error(ErrorKind::provider_error, "no provider configured (replay-only gateway)");
  }
  std::chrono::milliseconds backoff = retry_.base_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      std::unique_lock lock(mu_);
      slot_free_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
      ++in_flight_;
      lock.unlock();
      ChatResponse resp;
      try {
        resp = provider_->complete(req);
      } catch (...) {
        lock.lock();
        --in_flight_;
        slot_free_.notify_one();
        throw;
      }
      lock.lock();
      --in_flight_;
      slot_free_.notify_one();
      return resp;
    } catch (const Error& e) {
      bool retryable = e.transient() || e.kind() == ErrorKind::timeout;
      if (!retryable || attempt >= retry_.max_attempts) throw;
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<long>(static_cast<double>(backoff.count()) * retry_.multiplier));
    }
  }
}

std::vector<UsageEvent> Gateway::usage_log() const {
  std::lock_guard lock(mu_);
  return usage_;
}

size_t Gateway::call_count() const {
  std::lock_guard lock(mu_);
  return usage_.size();
}

size_t Gateway::call_count(const std::string& tag_prefix) const {
  std::lock_guard lock(mu_);
  size_t n = 0;
  for (const auto& e : usage_) {
    if (e.tag.rfind(tag_prefix, 0) == 0) ++n;
  }
  return n;
}

void CostModel::set_price(const std::string& model_id, PriceEntry price) {
  if (price.prompt_per_1k < 0 || price.completion_per_1k < 0) {
    throw Error(ErrorKind::config_error, "negative price for model " + model_id);
  }
  prices_[model_id] = price;
}

bool CostModel::has(const std::string& model_id) const { return prices_.count(model_id) > 0; }

const PriceEntry& CostModel::price(const std::string& model_id) const {
  auto it = prices_.find(model_id);
  if (it == prices_.end()) {
    throw Error(ErrorKind::unknown_model, "no price configured for model " + model_id);
  }
  return it->second;
}

CostBreakdown estimate_cost(std::span<const UsageEvent> log, const CostModel& model) {
  CostBreakdown out;
  for (const auto& e : log) {
    const PriceEntry& p = model.price(e.model_id);
    double cost = static_cast<double>(e.usage.prompt) / 1000.0 * p.prompt_per_1k +
                  static_cast<double>(e.usage.completion) / 1000.0 * p.completion_per_1k;
    out.per_tag[e.tag] += cost;
    out.per_model[e.model_id] += cost;
    out.total += cost;
  }
  return out;
}

}  // namespace clinichat::gateway
