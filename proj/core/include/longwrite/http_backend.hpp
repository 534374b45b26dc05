#pragma once

#include <memory>
#include <span>
#include <string>

#include "longwrite/backend.hpp"

namespace longwrite {

// Client for any endpoint speaking the OpenAI-style chat completion shape:
// POST {endpoint_url} with {model, messages, temperature, max_tokens}, reply
// {choices: [{message: {content}, finish_reason}], usage: {...}}.
//
// The credential is read from the environment variable named by
// profile.api_key_env at construction; a profile with an empty api_key_env
// declares an unauthenticated endpoint. Requests are sent with
// "Authorization: Bearer <key>" when a credential is present.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendProfile profile);
  ~HttpBackend() override;

  // Exposed for tests: request body for a turn list, byte-stable.
  std::string request_body(std::span<const ChatTurn> turns) const;

 protected:
  CompletionResult attempt_once(std::span<const ChatTurn> turns) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace longwrite
