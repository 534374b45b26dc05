#include <doctest.h>

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "longwrite/backend.hpp"
#include "longwrite/jsonl.hpp"
#include "longwrite/profile_config.hpp"
#include "longwrite/scripted_backend.hpp"
#include "support.hpp"

using namespace longwrite;
using testsupport::mock_profile;
using testsupport::TempDir;

TEST_SUITE("backend") {

TEST_CASE("scripted replies are consumed in order and never recycle") {
  ScriptedBackend backend(mock_profile());
  backend.push_replies({"first", "second"});
  CHECK(backend.complete("a").text == "first");
  CHECK(backend.complete("b").text == "second");
  try {
    backend.complete("c");
    FAIL("expected script exhaustion");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::script_exhausted);
  }
}

TEST_CASE("transient failures are retried up to max_retries") {
  ScriptedBackend backend(mock_profile(4, 3));
  backend.push_reply(ScriptedReply::transient_failure());
  backend.push_reply(ScriptedReply::transient_failure());
  backend.push_reply("took three attempts");
  CHECK(backend.complete("q").text == "took three attempts");
  CHECK(backend.request_count() == 1);  // one logical request
}

TEST_CASE("retries exhaust into transport_exhausted") {
  // max_retries = 1 means two attempts in total.
  ScriptedBackend backend(mock_profile(4, 1));
  backend.push_reply(ScriptedReply::transient_failure());
  backend.push_reply(ScriptedReply::transient_failure());
  backend.push_reply("never reached");
  try {
    backend.complete("q");
    FAIL("expected exhaustion");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::transport_exhausted);
  }
  CHECK(backend.complete("next").text == "never reached");
}

TEST_CASE("rules answer by substring, first match wins") {
  ScriptedBackend backend(mock_profile());
  backend.add_rule("alpha", "from alpha");
  backend.add_rule("", "fallback");
  CHECK(backend.complete("contains alpha somewhere").text == "from alpha");
  CHECK(backend.complete("nothing special").text == "fallback");
  CHECK(backend.complete("still nothing").text == "fallback");  // single reply recycles
}

TEST_CASE("multi-reply rules consume in order then exhaust") {
  ScriptedBackend backend(mock_profile());
  ScriptedRule rule;
  rule.match = "probe";
  ScriptedReply r1, r2;
  r1.text = "one";
  r2.text = "two";
  rule.replies = {r1, r2};
  backend.add_rule(rule);
  CHECK(backend.complete("probe").text == "one");
  CHECK(backend.complete("probe").text == "two");
  CHECK_THROWS_AS(backend.complete("probe"), BackendError);
}

TEST_CASE("request log records every logical request") {
  ScriptedBackend backend(mock_profile());
  backend.add_rule("", "ok");
  backend.complete("one");
  std::vector<ChatTurn> turns{{Role::system, "s"}, {Role::user, "two"}};
  backend.complete(turns);
  auto log = backend.request_log();
  REQUIRE(log.size() == 2);
  CHECK(log[0].size() == 1);
  CHECK(log[0][0].content == "one");
  CHECK(log[1].size() == 2);
  CHECK(ScriptedBackend::request_text(log[1]).find("two") != std::string::npos);
}

TEST_CASE("concurrency never exceeds the profile gate") {
  const int gate = 3;
  ScriptedBackend backend(mock_profile(gate));
  ScriptedRule rule;
  rule.match = "";
  ScriptedReply slow;
  slow.text = "ok";
  slow.delay_ms = 5;
  rule.replies = {slow};
  backend.add_rule(rule);

  std::vector<std::thread> threads;
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&backend] { backend.complete("x"); });
  }
  for (auto& t : threads) t.join();
  CHECK(backend.max_in_flight_seen() <= gate);
  CHECK(backend.request_count() == 12);
}

TEST_CASE("cancellation fails pending requests with a dedicated kind") {
  reset_cancellation();
  ScriptedBackend backend(mock_profile());
  backend.add_rule("", "ok");
  CHECK(backend.complete("before").text == "ok");
  request_cancellation();
  CHECK(cancellation_requested());
  try {
    backend.complete("after");
    FAIL("expected cancellation");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::cancelled);
  }
  reset_cancellation();
  CHECK(backend.complete("resumed").text == "ok");
}

TEST_CASE("reported latency comes from the reply, not wall time") {
  ScriptedBackend backend(mock_profile());
  ScriptedReply r;
  r.text = "ok";
  r.latency_ms = 1234;
  backend.push_reply(r);
  CHECK(backend.complete("q").latency_ms == 1234);
}

}  // TEST_SUITE

TEST_SUITE("profiles") {

TEST_CASE("profiles file parses sections and keys") {
  TempDir tmp;
  const auto path = tmp.path / "profiles.conf";
  write_file(path,
             "# comment\n"
             "[profile a]\n"
             "type = scripted\n"
             "rules = rules.jsonl\n"
             "model_id = m1\n"
             "max_concurrency = 2\n"
             "\n"
             "[profile b]\n"
             "type = http\n"
             "endpoint_url = https://example.org/v1/chat\n"
             "api_key_env = EXAMPLE_KEY\n"
             "temperature = 0.7\n");
  write_file(tmp.path / "rules.jsonl", "{\"match\": \"\", \"text\": \"ok\"}\n");

  auto profiles = load_profiles(path);
  REQUIRE(profiles.size() == 2);

  const auto& a = get_profile(profiles, "a");
  CHECK(a.kind == BackendKind::scripted);
  CHECK(a.profile.model_id == "m1");
  CHECK(a.profile.max_concurrency == 2);
  // relative paths resolve against the config file location
  CHECK(a.rules_file == tmp.path / "rules.jsonl");

  const auto& b = get_profile(profiles, "b");
  CHECK(b.kind == BackendKind::http);
  CHECK(b.profile.endpoint_url == "https://example.org/v1/chat");
  CHECK(b.profile.temperature == doctest::Approx(0.7));

  CHECK_THROWS(get_profile(profiles, "missing"));
}

TEST_CASE("unknown keys fail loudly") {
  TempDir tmp;
  const auto path = tmp.path / "profiles.conf";
  write_file(path, "[profile a]\ntype = scripted\nscirpt = oops.jsonl\n");
  CHECK_THROWS(load_profiles(path));
}

TEST_CASE("http profiles require an endpoint") {
  TempDir tmp;
  const auto path = tmp.path / "profiles.conf";
  write_file(path, "[profile a]\ntype = http\nmodel_id = m\n");
  CHECK_THROWS(load_profiles(path));
}

TEST_CASE("make_backend builds a working scripted backend from files") {
  TempDir tmp;
  write_file(tmp.path / "profiles.conf",
             "[profile mock]\ntype = scripted\nrules = r.jsonl\nmodel_id = m\n");
  write_file(tmp.path / "r.jsonl",
             "{\"match\": \"ping\", \"text\": \"pong\", \"latency_ms\": 3}\n"
             "{\"match\": \"\", \"text\": \"default\"}\n");
  auto profiles = load_profiles(tmp.path / "profiles.conf");
  auto backend = make_backend(get_profile(profiles, "mock"));
  auto result = backend->complete("ping please");
  CHECK(result.text == "pong");
  CHECK(result.latency_ms == 3);
  CHECK(backend->complete("other").text == "default");
}

TEST_CASE("script files honor failure and finish-reason entries") {
  TempDir tmp;
  write_file(tmp.path / "profiles.conf",
             "[profile mock]\ntype = scripted\nscript = s.jsonl\nmodel_id = m\n"
             "max_retries = 3\n");
  write_file(tmp.path / "s.jsonl",
             "{\"fail\": \"transient\"}\n"
             "{\"text\": \"recovered\", \"finish_reason\": \"length\"}\n");
  auto profiles = load_profiles(tmp.path / "profiles.conf");
  auto backend = make_backend(get_profile(profiles, "mock"));
  auto result = backend->complete("q");
  CHECK(result.text == "recovered");
  CHECK(result.finish_reason == FinishReason::length);
  CHECK(result.truncated());
}

TEST_CASE("missing credential is reported by kind") {
  TempDir tmp;
  write_file(tmp.path / "profiles.conf",
             "[profile live]\ntype = http\n"
             "endpoint_url = https://example.org/v1/chat\n"
             "api_key_env = LONGWRITE_TEST_SURELY_UNSET_KEY\n");
  auto profiles = load_profiles(tmp.path / "profiles.conf");
  try {
    make_backend(get_profile(profiles, "live"));
    FAIL("expected missing credential");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::credential_missing);
  }
}

}  // TEST_SUITE
