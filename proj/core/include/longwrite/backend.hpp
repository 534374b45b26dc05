#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "longwrite/types.hpp"

namespace longwrite {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
std::optional<Role> role_from_string(std::string_view s);

struct ChatTurn {
  Role role = Role::user;
  std::string content;

  friend bool operator==(const ChatTurn&, const ChatTurn&) = default;
};

enum class FinishReason { stop, length, refusal, other };

std::string_view to_string(FinishReason r);
std::optional<FinishReason> finish_reason_from_string(std::string_view s);

struct CompletionResult {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
  int64_t latency_ms = 0;

  bool truncated() const { return finish_reason == FinishReason::length; }
};

struct BackendProfile {
  std::string name;
  std::string endpoint_url;
  std::string api_key_env;  // empty when the endpoint needs no credential
  std::string model_id;
  double temperature = 0.5;
  int64_t max_output_tokens = 32768;
  int request_timeout_s = 300;
  int max_retries = 3;
  int max_concurrency = 4;
  int64_t retry_base_ms = 1000;  // doubled per attempt, plus jitter
};

enum class BackendErrorKind {
  credential_missing,
  transport_exhausted,  // transient failures survived max_retries
  provider_error,       // non-retryable HTTP status or malformed reply
  timeout,
  script_exhausted,     // scripted backend ran out of canned replies
  cancelled,
};

std::string_view to_string(BackendErrorKind kind);

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  BackendErrorKind kind() const { return kind_; }

 private:
  BackendErrorKind kind_;
};

// Thrown by attempt_once() implementations for failures worth retrying
// (transport errors, 5xx, 429). complete() converts the final one into a
// BackendError{transport_exhausted}.
class TransientBackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Process-wide cooperative cancellation (set from a signal handler, checked
// by complete() before every attempt). Once set, pending requests fail with
// BackendError{cancelled}; batch runners record those per item, so partial
// output files still land on disk.
void request_cancellation();
bool cancellation_requested();
void reset_cancellation();

// One chat-completion endpoint. complete() adds the shared behavior every
// implementation needs: the in-flight gate (never more than max_concurrency
// requests at once), and retries with exponentially backed-off, jittered
// sleeps for transient failures.
class Backend {
 public:
  explicit Backend(BackendProfile profile);
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const BackendProfile& profile() const { return profile_; }

  CompletionResult complete(std::span<const ChatTurn> turns);
  CompletionResult complete(const std::string& user_content);

  // High-water mark of concurrent in-flight requests, for tests.
  int max_in_flight_seen() const { return gauge_high_water_.load(); }

 protected:
  // A single request attempt. Throws TransientBackendError to request a
  // retry, BackendError for permanent failures.
  virtual CompletionResult attempt_once(std::span<const ChatTurn> turns) = 0;

  // Called once per complete() call, before the first attempt.
  virtual void on_request(std::span<const ChatTurn> turns) { (void)turns; }

 private:
  int64_t backoff_ms(int attempt);

  BackendProfile profile_;
  std::mutex gate_mutex_;
  std::condition_variable gate_cv_;
  int in_flight_ = 0;
  std::atomic<int> gauge_high_water_{0};
  std::mutex rng_mutex_;
  std::mt19937_64 jitter_rng_;
};

}  // namespace longwrite
