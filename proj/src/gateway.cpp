#include "opinion_forge/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "opinion_forge/util.hpp"

namespace opinion_forge {

namespace {

struct ParsedEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // prefix, no trailing slash
};

ParsedEndpoint parse_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  ParsedEndpoint out;
  if (path_start == std::string::npos) {
    out.base = url;
  } else {
    out.base = url.substr(0, path_start);
    out.path = url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  }
  return out;
}

nlohmann::json messages_to_json(const MessageList& messages) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : messages) {
    arr.push_back({{"role", m.role}, {"content", m.content}});
  }
  return arr;
}

}  // namespace

Completion HttpChatBackend::complete(const MessageList& messages, const ChatParams& params,
                                     std::string_view) {
  auto endpoint = parse_endpoint(params.endpoint);
  long max_tokens = params.max_output_tokens;
  if (params.endpoint_max_tokens > 0 && max_tokens > params.endpoint_max_tokens) {
    max_tokens = params.endpoint_max_tokens;
    std::call_once(clamp_warned_, [&] {
      std::fprintf(stderr, "warn: clamping max_tokens %ld -> %ld for %s\n",
                   params.max_output_tokens, max_tokens, params.endpoint.c_str());
    });
  }
  nlohmann::json body{{"model", params.model},
                      {"messages", messages_to_json(messages)},
                      {"temperature", params.temperature},
                      {"max_tokens", max_tokens}};
  std::string payload = body.dump();
  std::string path = endpoint.path + "/chat/completions";

  httplib::Headers headers;
  if (const char* key = std::getenv("OPINION_FORGE_API_KEY"); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  int budget = std::max(1, params.max_retries);
  auto started = std::chrono::steady_clock::now();
  for (int attempt = 1;; ++attempt) {
    httplib::Client cli(endpoint.base);
    auto timeout = std::chrono::duration<double>(params.timeout_s);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);

    auto res = cli.Post(path, headers, payload, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw ApiError(res->status, std::string("unparseable response body: ") + e.what());
      }
      Completion out;
      try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw ApiError(res->status, "response has no choices[0].message.content");
      }
      if (auto usage = reply.find("usage"); usage != reply.end() && usage->is_object()) {
        out.usage.prompt_tokens = usage->value("prompt_tokens", 0L);
        out.usage.completion_tokens = usage->value("completion_tokens", 0L);
      }
      out.attempts = attempt;
      out.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      return out;
    }
    if (res && res->status < 500) {
      throw ApiError(res->status, res->body);  // 4xx: not retryable
    }
    if (attempt >= budget) {
      if (res) throw ApiError(res->status, res->body);
      std::string why = httplib::to_string(res.error());
      if (res.error() == httplib::Error::ConnectionTimeout ||
          res.error() == httplib::Error::Read) {
        throw TimeoutError("request timed out: " + why);
      }
      throw TransportError("transport failure: " + why);
    }
    double delay = params.backoff_initial_s * static_cast<double>(1 << (attempt - 1));
    std::this_thread::sleep_for(std::chrono::duration<double>(delay));
  }
}

std::shared_ptr<MockChatBackend> MockChatBackend::scripted(
    std::map<std::string, std::string> by_tag) {
  auto table = std::make_shared<std::map<std::string, std::string>>(std::move(by_tag));
  return std::make_shared<MockChatBackend>(
      [table](std::string_view tag, const MessageList&) -> std::string {
        auto it = table->find(std::string(tag));
        if (it == table->end()) {
          throw TransportError("mock backend has no response for tag: " + std::string(tag));
        }
        return it->second;
      });
}

std::shared_ptr<MockChatBackend> MockChatBackend::from_fixture_file(
    const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad mock fixture " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("mock fixture must be a JSON object: " + path.string());
  std::map<std::string, std::string> table;
  for (auto it = j.begin(); it != j.end(); ++it) {
    table[it.key()] = it.value().get<std::string>();
  }
  return scripted(std::move(table));
}

std::shared_ptr<MockChatBackend> MockChatBackend::constant(std::string text) {
  return std::make_shared<MockChatBackend>(
      [text = std::move(text)](std::string_view, const MessageList&) { return text; });
}

Completion MockChatBackend::complete(const MessageList& messages, const ChatParams&,
                                     std::string_view tag) {
  calls_.fetch_add(1);
  Completion out;
  out.text = responder_(tag, messages);
  return out;
}

std::string cache_key(const MessageList& messages, const ChatParams& params) {
  std::string buf = params.model;
  buf += '\x1f';
  for (const auto& m : messages) {
    buf += m.role;
    buf += '\x1f';
    buf += m.content;
    buf += '\x1e';
  }
  char tail[64];
  std::snprintf(tail, sizeof(tail), "\x1f%.10g\x1f%ld", params.temperature,
                params.max_output_tokens);
  buf += tail;
  return sha256_hex(buf);
}

// Bounded in-flight counter; std::counting_semaphore's cap is a template
// parameter, so wrap a condition variable instead.
class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}
  void acquire() {
    std::unique_lock lk(mu_);
    cv_.wait(lk, [&] { return count_ > 0; });
    --count_;
  }
  void release() {
    {
      std::lock_guard lk(mu_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int count_;
};

struct Gateway::InFlight {
  std::mutex mu;
  std::condition_variable cv;
  bool done = false;
  Completion result;
  std::exception_ptr error;
};

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, Options options)
    : backend_(std::move(backend)),
      options_(std::move(options)),
      semaphore_(std::make_unique<Semaphore>(std::max(1, options_.max_inflight))) {}

Completion Gateway::call_upstream(const MessageList& messages, const ChatParams& params,
                                  std::string_view tag) {
  semaphore_->acquire();
  upstream_calls_.fetch_add(1);
  struct Release {
    Semaphore* s;
    ~Release() { s->release(); }
  } release{semaphore_.get()};
  return backend_->complete(messages, params, tag);
}

Completion Gateway::complete(const MessageList& messages, const ChatParams& params,
                             std::string_view tag) {
  if (options_.cache_dir.empty()) {
    return call_upstream(messages, params, tag);
  }
  std::string key = cache_key(messages, params);
  auto path = options_.cache_dir / key.substr(0, 2) / (key + ".json");

  auto try_read = [&]() -> std::optional<Completion> {
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
      auto j = nlohmann::json::parse(read_file(path));
      if (j.value("key", "") != key) throw CacheError("cache key mismatch in " + path.string());
      Completion out;
      out.text = j.at("response").get<std::string>();
      out.usage.prompt_tokens = j.value("prompt_tokens", 0L);
      out.usage.completion_tokens = j.value("completion_tokens", 0L);
      out.from_cache = true;
      return out;
    } catch (const CacheError&) {
      throw;
    } catch (const std::exception& e) {
      throw CacheError("unreadable cache entry " + path.string() + ": " + e.what());
    }
  };

  try {
    if (auto hit = try_read()) return *hit;
  } catch (const CacheError& e) {
    std::fprintf(stderr, "warn: %s; refetching\n", e.what());
  }

  // Single flight per key: the first caller goes upstream, the rest wait.
  std::shared_ptr<InFlight> flight;
  bool leader = false;
  {
    std::lock_guard lk(flights_mu_);
    auto it = flights_.find(key);
    if (it == flights_.end()) {
      flight = std::make_shared<InFlight>();
      flights_[key] = flight;
      leader = true;
    } else {
      flight = it->second;
    }
  }

  if (!leader) {
    std::unique_lock lk(flight->mu);
    flight->cv.wait(lk, [&] { return flight->done; });
    if (flight->error) std::rethrow_exception(flight->error);
    return flight->result;
  }

  Completion result;
  std::exception_ptr error;
  try {
    // Re-check under single flight: a concurrent leader may have just landed.
    if (auto hit = try_read()) {
      result = *hit;
    } else {
      result = call_upstream(messages, params, tag);
      nlohmann::json entry{{"key", key},
                           {"model", params.model},
                           {"response", result.text},
                           {"prompt_tokens", result.usage.prompt_tokens},
                           {"completion_tokens", result.usage.completion_tokens}};
      atomic_write_file(path, entry.dump());
    }
  } catch (const CacheError&) {
    // Unreadable entry under race: refetch without caching this round.
    try {
      result = call_upstream(messages, params, tag);
    } catch (...) {
      error = std::current_exception();
    }
  } catch (...) {
    error = std::current_exception();
  }

  {
    std::lock_guard lk(flight->mu);
    flight->result = result;
    flight->error = error;
    flight->done = true;
  }
  flight->cv.notify_all();
  {
    std::lock_guard lk(flights_mu_);
    flights_.erase(key);
  }
  if (error) std::rethrow_exception(error);
  return result;
}

}  // namespace opinion_forge
