#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "opinion_forge/errors.hpp"

namespace opinion_forge {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using MessageList = std::vector<ChatMessage>;

struct ChatParams {
  std::string model;
  double temperature = 0.0;
  long max_output_tokens = 16384;
  std::string endpoint;  // e.g. http://localhost:8000/v1
  double timeout_s = 120.0;
  int max_retries = 3;             // total attempt budget
  double backoff_initial_s = 0.25; // doubles per retry
  long endpoint_max_tokens = 0;    // 0 = endpoint accepts the full budget
};

struct Usage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct Completion {
  std::string text;
  Usage usage;
  double latency_ms = 0.0;
  int attempts = 1;
  bool from_cache = false;
};

// One chat-completion transport. The tag identifies the work item (sentence
// id); it never reaches the wire or the cache key, it only lets scripted
// backends answer per sentence.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual Completion complete(const MessageList& messages, const ChatParams& params,
                              std::string_view tag) = 0;
};

// POST {endpoint}/chat/completions with the standard OpenAI-compatible body.
// Retries transport errors and 5xx with exponential backoff up to the attempt
// budget; other statuses surface immediately as ApiError. Reads the bearer
// token from OPINION_FORGE_API_KEY when set.
class HttpChatBackend : public ChatBackend {
 public:
  HttpChatBackend() = default;
  Completion complete(const MessageList& messages, const ChatParams& params,
                      std::string_view tag) override;

 private:
  std::once_flag clamp_warned_;
};

// Scripted backend for tests and dry runs.
class MockChatBackend : public ChatBackend {
 public:
  using Responder = std::function<std::string(std::string_view tag, const MessageList& messages)>;

  explicit MockChatBackend(Responder responder) : responder_(std::move(responder)) {}

  // Fixed response per tag; unknown tags raise TransportError.
  static std::shared_ptr<MockChatBackend> scripted(std::map<std::string, std::string> by_tag);
  // Same map loaded from a JSON object file {tag: response}.
  static std::shared_ptr<MockChatBackend> from_fixture_file(const std::filesystem::path& path);
  // Constant response regardless of input.
  static std::shared_ptr<MockChatBackend> constant(std::string text);

  Completion complete(const MessageList& messages, const ChatParams& params,
                      std::string_view tag) override;

  uint64_t calls() const { return calls_.load(); }

 private:
  Responder responder_;
  std::atomic<uint64_t> calls_{0};
};

// SHA-256 over (model, rendered messages, temperature, max_output_tokens);
// stable across processes.
std::string cache_key(const MessageList& messages, const ChatParams& params);

// Caching front door. Identical requests are served from a content-addressed
// file cache (cache/<2 hex>/<key>.json); concurrent misses for one key make
// exactly one upstream call; in-flight upstream calls are bounded.
class Gateway {
 public:
  struct Options {
    std::filesystem::path cache_dir;  // empty = caching off
    int max_inflight = 4;
  };

  Gateway(std::shared_ptr<ChatBackend> backend, Options options);

  Completion complete(const MessageList& messages, const ChatParams& params,
                      std::string_view tag = {});

  uint64_t upstream_calls() const { return upstream_calls_.load(); }

 private:
  Completion call_upstream(const MessageList& messages, const ChatParams& params,
                           std::string_view tag);

  std::shared_ptr<ChatBackend> backend_;
  Options options_;

  struct InFlight;
  std::mutex flights_mu_;
  std::map<std::string, std::shared_ptr<InFlight>> flights_;

  std::atomic<uint64_t> upstream_calls_{0};
  std::unique_ptr<class Semaphore> semaphore_;
};

}  // namespace opinion_forge
