#include "longwrite/scripted_backend.hpp"

#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "longwrite/jsonl.hpp"

namespace longwrite {

namespace {
int64_t naive_token_count(std::string_view text) {
  // Whitespace-split approximation; good enough for deterministic bookkeeping.
  int64_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (space) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}
}  // namespace

ScriptedBackend::ScriptedBackend(BackendProfile profile)
    : Backend(std::move(profile)) {}

void ScriptedBackend::push_reply(ScriptedReply reply) {
  std::lock_guard lock(mutex_);
  script_.push_back(std::move(reply));
}

void ScriptedBackend::push_reply(std::string text) {
  ScriptedReply r;
  r.text = std::move(text);
  push_reply(std::move(r));
}

void ScriptedBackend::push_replies(std::initializer_list<std::string> texts) {
  for (const auto& t : texts) push_reply(t);
}

void ScriptedBackend::add_rule(std::string match, std::string reply) {
  ScriptedRule rule;
  rule.match = std::move(match);
  ScriptedReply r;
  r.text = std::move(reply);
  rule.replies.push_back(std::move(r));
  add_rule(std::move(rule));
}

void ScriptedBackend::add_rule(ScriptedRule rule) {
  std::lock_guard lock(mutex_);
  rules_.push_back(std::move(rule));
  rule_cursor_.push_back(0);
}

std::vector<std::vector<ChatTurn>> ScriptedBackend::request_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

size_t ScriptedBackend::request_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

std::string ScriptedBackend::request_text(std::span<const ChatTurn> turns) {
  std::string out;
  for (const auto& turn : turns) {
    if (!out.empty()) out.push_back('\n');
    out += turn.content;
  }
  return out;
}

void ScriptedBackend::on_request(std::span<const ChatTurn> turns) {
  std::lock_guard lock(mutex_);
  log_.emplace_back(turns.begin(), turns.end());
}

ScriptedReply ScriptedBackend::take_reply(const std::string& request) {
  std::lock_guard lock(mutex_);
  if (!script_.empty() || rules_.empty()) {
    if (script_.empty()) {
      throw BackendError(BackendErrorKind::script_exhausted,
                         "script exhausted after " + std::to_string(log_.size()) +
                             " requests");
    }
    ScriptedReply r = std::move(script_.front());
    script_.pop_front();
    return r;
  }
  for (size_t i = 0; i < rules_.size(); ++i) {
    if (request.find(rules_[i].match) == std::string::npos) continue;
    const auto& replies = rules_[i].replies;
    if (replies.size() == 1) return replies.front();  // stateless rule
    if (rule_cursor_[i] >= replies.size()) {
      throw BackendError(BackendErrorKind::script_exhausted,
                         "rule \"" + rules_[i].match + "\" exhausted its " +
                             std::to_string(replies.size()) + " replies");
    }
    return replies[rule_cursor_[i]++];
  }
  throw BackendError(BackendErrorKind::script_exhausted,
                     "no rule matches request");
}

CompletionResult ScriptedBackend::attempt_once(std::span<const ChatTurn> turns) {
  const std::string request = request_text(turns);
  ScriptedReply reply = take_reply(request);
  if (reply.delay_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(reply.delay_ms));
  }
  if (reply.fail_transient) {
    throw TransientBackendError("scripted transient failure");
  }
  CompletionResult result;
  result.text = std::move(reply.text);
  result.finish_reason = reply.finish_reason;
  result.prompt_tokens = naive_token_count(request);
  result.completion_tokens = naive_token_count(result.text);
  result.latency_ms = reply.latency_ms;
  return result;
}

namespace {
ScriptedReply reply_from_json(const nlohmann::json& j, size_t line) {
  ScriptedReply r;
  if (j.contains("fail") && j.at("fail").get<std::string>() == "transient") {
    r.fail_transient = true;
    return r;
  }
  if (!j.contains("text") || !j.at("text").is_string()) {
    throw SchemaError("script entry needs a string \"text\"", line);
  }
  r.text = j.at("text").get<std::string>();
  if (j.contains("finish_reason")) {
    auto fr = finish_reason_from_string(j.at("finish_reason").get<std::string>());
    if (!fr) throw SchemaError("unknown finish_reason", line);
    r.finish_reason = *fr;
  }
  if (j.contains("delay_ms")) r.delay_ms = j.at("delay_ms").get<int64_t>();
  if (j.contains("latency_ms")) r.latency_ms = j.at("latency_ms").get<int64_t>();
  return r;
}
}  // namespace

void load_script_file(ScriptedBackend& backend, const std::filesystem::path& path) {
  for_each_jsonl_line(path, [&](std::string_view text, size_t line) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("bad script JSON: ") + e.what(), line);
    }
    backend.push_reply(reply_from_json(j, line));
  });
}

void load_rules_file(ScriptedBackend& backend, const std::filesystem::path& path) {
  for_each_jsonl_line(path, [&](std::string_view text, size_t line) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("bad rule JSON: ") + e.what(), line);
    }
    if (!j.contains("match") || !j.at("match").is_string()) {
      throw SchemaError("rule entry needs a string \"match\"", line);
    }
    ScriptedRule rule;
    rule.match = j.at("match").get<std::string>();
    if (j.contains("replies")) {
      for (const auto& rj : j.at("replies")) {
        rule.replies.push_back(reply_from_json(rj, line));
      }
    } else {
      rule.replies.push_back(reply_from_json(j, line));
    }
    if (rule.replies.empty()) {
      throw SchemaError("rule entry needs at least one reply", line);
    }
    backend.add_rule(std::move(rule));
  });
}

}  // namespace longwrite
