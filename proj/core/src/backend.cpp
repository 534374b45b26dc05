#include "longwrite/backend.hpp"

#include <chrono>
#include <thread>

#include "longwrite/rng.hpp"

namespace longwrite {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

std::optional<Role> role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  return std::nullopt;
}

std::string_view to_string(FinishReason r) {
  switch (r) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::refusal: return "refusal";
    case FinishReason::other: return "other";
  }
  return "other";
}

std::optional<FinishReason> finish_reason_from_string(std::string_view s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  if (s == "refusal") return FinishReason::refusal;
  if (s == "other") return FinishReason::other;
  return std::nullopt;
}

std::string_view to_string(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::credential_missing: return "credential_missing";
    case BackendErrorKind::transport_exhausted: return "transport_exhausted";
    case BackendErrorKind::provider_error: return "provider_error";
    case BackendErrorKind::timeout: return "timeout";
    case BackendErrorKind::script_exhausted: return "script_exhausted";
    case BackendErrorKind::cancelled: return "cancelled";
  }
  return "provider_error";
}

namespace {
std::atomic<bool> g_cancelled{false};
}  // namespace

void request_cancellation() { g_cancelled.store(true, std::memory_order_relaxed); }
bool cancellation_requested() { return g_cancelled.load(std::memory_order_relaxed); }
void reset_cancellation() { g_cancelled.store(false, std::memory_order_relaxed); }

Backend::Backend(BackendProfile profile)
    : profile_(std::move(profile)),
      jitter_rng_(derive_seed(0x6C6F6E67, profile_.name)) {}

int64_t Backend::backoff_ms(int attempt) {
  const int64_t base = profile_.retry_base_ms << attempt;  // 1s, 2s, 4s, ...
  int64_t jitter = 0;
  if (base > 0) {
    std::lock_guard lock(rng_mutex_);
    jitter = static_cast<int64_t>(uniform_index(jitter_rng_, static_cast<uint64_t>(base / 4 + 1)));
  }
  return base + jitter;
}

CompletionResult Backend::complete(std::span<const ChatTurn> turns) {
  struct GateSlot {
    Backend& b;
    explicit GateSlot(Backend& backend) : b(backend) {
      std::unique_lock lock(b.gate_mutex_);
      b.gate_cv_.wait(lock, [&] { return b.in_flight_ < b.profile_.max_concurrency; });
      ++b.in_flight_;
      int high = b.gauge_high_water_.load();
      while (b.in_flight_ > high &&
             !b.gauge_high_water_.compare_exchange_weak(high, b.in_flight_)) {
      }
    }
    ~GateSlot() {
      {
        std::lock_guard lock(b.gate_mutex_);
        --b.in_flight_;
      }
      b.gate_cv_.notify_one();
    }
  };

  GateSlot slot(*this);
  on_request(turns);

  std::string last_error;
  for (int attempt = 0; attempt <= profile_.max_retries; ++attempt) {
    if (cancellation_requested()) {
      throw BackendError(BackendErrorKind::cancelled, "run cancelled");
    }
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms(attempt - 1)));
    }
    try {
      return attempt_once(turns);
    } catch (const TransientBackendError& e) {
      last_error = e.what();
    }
  }
  throw BackendError(BackendErrorKind::transport_exhausted,
                     "gave up after " + std::to_string(profile_.max_retries + 1) +
                         " attempts: " + last_error);
}

CompletionResult Backend::complete(const std::string& user_content) {
  const ChatTurn turn{Role::user, user_content};
  return complete(std::span<const ChatTurn>(&turn, 1));
}

}  // namespace longwrite
