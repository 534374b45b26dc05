#include "longwrite/http_backend.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace longwrite {

namespace {
struct ParsedUrl {
  std::string host_port;  // scheme://host[:port], what httplib::Client wants
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw BackendError(BackendErrorKind::provider_error,
                       "endpoint_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

FinishReason map_finish_reason(const std::string& s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length" || s == "max_tokens") return FinishReason::length;
  if (s == "content_filter" || s == "refusal") return FinishReason::refusal;
  return FinishReason::other;
}
}  // namespace

struct HttpBackend::Impl {
  ParsedUrl url;
  std::string api_key;
};

HttpBackend::HttpBackend(BackendProfile profile)
    : Backend(std::move(profile)), impl_(std::make_unique<Impl>()) {
  impl_->url = split_url(this->profile().endpoint_url);
  const std::string& key_env = this->profile().api_key_env;
  if (!key_env.empty()) {
    const char* key = std::getenv(key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw BackendError(BackendErrorKind::credential_missing,
                         "environment variable " + key_env +
                             " is not set (required by profile " +
                             this->profile().name + ")");
    }
    impl_->api_key = key;
  }
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::request_body(std::span<const ChatTurn> turns) const {
  nlohmann::ordered_json body;
  body["model"] = profile().model_id;
  auto& messages = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& turn : turns) {
    messages.push_back({{"role", std::string(to_string(turn.role))},
                        {"content", turn.content}});
  }
  body["temperature"] = profile().temperature;
  body["max_tokens"] = profile().max_output_tokens;
  return body.dump();
}

CompletionResult HttpBackend::attempt_once(std::span<const ChatTurn> turns) {
  httplib::Client client(impl_->url.host_port);
  client.set_connection_timeout(profile().request_timeout_s, 0);
  client.set_read_timeout(profile().request_timeout_s, 0);
  client.set_write_timeout(profile().request_timeout_s, 0);

  httplib::Headers headers;
  if (!impl_->api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->api_key);
  }

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(impl_->url.path, headers, request_body(turns),
                         "application/json");
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  if (!res) {
    // Connection refused, timeouts, broken reads: all transport-level, all
    // retryable. complete() raises transport_exhausted when they persist.
    throw TransientBackendError("transport error: " +
                                httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransientBackendError("HTTP " + std::to_string(res->status) + ": " +
                                res->body);
  }
  if (res->status != 200) {
    throw BackendError(BackendErrorKind::provider_error,
                       "HTTP " + std::to_string(res->status) + ": " + res->body);
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(BackendErrorKind::provider_error,
                       std::string("unparseable reply: ") + e.what());
  }

  CompletionResult result;
  try {
    const auto& choice = reply.at("choices").at(0);
    result.text = choice.at("message").at("content").get<std::string>();
    if (choice.contains("finish_reason") && choice.at("finish_reason").is_string()) {
      result.finish_reason =
          map_finish_reason(choice.at("finish_reason").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(BackendErrorKind::provider_error,
                       std::string("reply missing choices[0].message.content: ") +
                           e.what());
  }
  if (reply.contains("usage")) {
    const auto& usage = reply["usage"];
    result.prompt_tokens = usage.value("prompt_tokens", int64_t{0});
    result.completion_tokens = usage.value("completion_tokens", int64_t{0});
  }
  result.latency_ms = elapsed;
  return result;
}

}  // namespace longwrite
