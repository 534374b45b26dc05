#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "longwrite/backend.hpp"

namespace longwrite {

// One canned completion. fail_transient entries are consumed like replies but
// raise a retryable failure instead, which is how tests script flaky
// transports. delay_ms holds the reply back so concurrency tests can observe
// overlapping requests.
struct ScriptedReply {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  bool fail_transient = false;
  int64_t delay_ms = 0;
  int64_t latency_ms = 0;  // reported in the result, not slept

  static ScriptedReply transient_failure() {
    ScriptedReply r;
    r.fail_transient = true;
    return r;
  }
};

// A substring rule. The first rule whose `match` occurs anywhere in the
// request text wins. A rule with one reply answers every hit; a rule with
// several consumes them in order and raises script_exhausted afterwards.
struct ScriptedRule {
  std::string match;
  std::vector<ScriptedReply> replies;
};

// Deterministic chat backend for tests and offline runs. Replies come either
// from an ordered script (consumed once, hard error on exhaustion; replies
// never recycle silently) or from substring rules. Every complete() call is
// recorded in a synchronized request log.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(BackendProfile profile);

  // Ordered-script mode.
  void push_reply(ScriptedReply reply);
  void push_reply(std::string text);
  void push_replies(std::initializer_list<std::string> texts);

  // Rule mode. Rules are checked in insertion order.
  void add_rule(std::string match, std::string reply);
  void add_rule(ScriptedRule rule);

  std::vector<std::vector<ChatTurn>> request_log() const;
  size_t request_count() const;

  // All request text joined, for "this reply was sent exactly once" checks.
  static std::string request_text(std::span<const ChatTurn> turns);

 protected:
  CompletionResult attempt_once(std::span<const ChatTurn> turns) override;
  void on_request(std::span<const ChatTurn> turns) override;

 private:
  ScriptedReply take_reply(const std::string& request);

  mutable std::mutex mutex_;
  std::deque<ScriptedReply> script_;
  std::vector<ScriptedRule> rules_;
  std::vector<size_t> rule_cursor_;
  std::vector<std::vector<ChatTurn>> log_;
};

// Loads a scripted backend from JSONL files; used by the CLI's scripted
// profiles. Entry shapes are documented in the README.
void load_script_file(ScriptedBackend& backend, const std::filesystem::path& path);
void load_rules_file(ScriptedBackend& backend, const std::filesystem::path& path);

}  // namespace longwrite
