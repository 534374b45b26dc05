#include <doctest.h>

#include <string>
#include <vector>

#include "longwrite/agentwrite.hpp"
#include "longwrite/scripted_backend.hpp"
#include "plan_corpus.hpp"
#include "support.hpp"

using namespace longwrite;
using namespace longwrite::agentwrite;
using testsupport::mock_profile;

namespace {

WritingInstruction make_instruction() {
  WritingInstruction ins;
  ins.id = "t-1";
  ins.language = Language::en;
  ins.text = "Write a 1200-word essay on tide gauges.";
  ins.required_length = 1200;
  return ins;
}

std::string two_step_plan() {
  return
      "Paragraph 1 - Main Point: The gauges themselves - Word Count: 600 words\n"
      "Paragraph 2 - Main Point: What their record shows - Word Count: 600 words";
}

}  // namespace

TEST_SUITE("agentwrite") {

TEST_CASE("plan prompt embeds the instruction verbatim") {
  const auto ins = make_instruction();
  const std::string prompt = build_plan_prompt(ins);
  CHECK(prompt.find(ins.text) != std::string::npos);
  CHECK(prompt.find("break down") != std::string::npos);
  CHECK(prompt == build_plan_prompt(ins));  // byte-stable
}

TEST_CASE("hand-built corpus parses to the expected steps or error") {
  for (const auto& c : testsupport::plan_corpus()) {
    CAPTURE(c.name);
    if (c.err == testsupport::PlanErr::none) {
      const WritingPlan plan = parse_plan(c.text, c.max_steps, "id");
      REQUIRE(plan.steps.size() == c.steps.size());
      for (size_t i = 0; i < c.steps.size(); ++i) {
        CAPTURE(i);
        CHECK(plan.steps[i].index == static_cast<int>(i) + 1);
        CHECK(plan.steps[i].main_point == c.steps[i].main_point);
        CHECK(plan.steps[i].target_words == c.steps[i].target_words);
        CHECK(plan.steps[i].out_of_range == c.steps[i].out_of_range);
      }
      CHECK(plan.raw == c.text);
    } else {
      try {
        parse_plan(c.text, c.max_steps, "id");
        FAIL_CHECK(c.name << ": expected a parse error");
      } catch (const PlanParseError& e) {
        const auto want = c.err == testsupport::PlanErr::no_steps
                              ? PlanParseErrorKind::no_steps
                              : PlanParseErrorKind::too_many_steps;
        CHECK(e.kind() == want);
      }
    }
  }
}

TEST_CASE("write prompt carries plan, history, and the step line") {
  const auto ins = make_instruction();
  const WritingPlan plan = parse_plan(two_step_plan(), 50, ins.id);
  const std::vector<std::string> history{"First paragraph text."};

  const std::string p2 = build_write_prompt(ins, plan, history, plan.steps[1]);
  CHECK(p2.find(ins.text) != std::string::npos);
  CHECK(p2.find(plan.raw) != std::string::npos);
  CHECK(p2.find("First paragraph text.") != std::string::npos);
  CHECK(p2.find(plan.steps[1].source_line) != std::string::npos);
  CHECK(p2.find(kEmptyHistoryMarker) == std::string::npos);

  const std::string p1 = build_write_prompt(ins, plan, {}, plan.steps[0]);
  CHECK(p1.find(kEmptyHistoryMarker) != std::string::npos);

  CHECK_THROWS_AS(build_write_prompt(ins, plan, history, plan.steps[0]),
                  std::invalid_argument);
}

TEST_CASE("isolated write prompt always uses the empty-history marker") {
  const auto ins = make_instruction();
  const WritingPlan plan = parse_plan(two_step_plan(), 50, ins.id);
  const std::string p = build_write_prompt_isolated(ins, plan, plan.steps[1]);
  CHECK(p.find(kEmptyHistoryMarker) != std::string::npos);
}

TEST_CASE("sequential run feeds prior paragraphs forward") {
  ScriptedBackend backend(mock_profile());
  backend.push_replies({two_step_plan(), "Alpha paragraph.", "Beta paragraph."});

  const auto result = run_sequential(backend, make_instruction());
  REQUIRE(result.paragraphs.size() == 2);
  CHECK(result.mode == GenerationMode::agentwrite);
  CHECK(result.final_text == "Alpha paragraph.\n\nBeta paragraph.");
  CHECK(result.per_step_lengths == std::vector<int64_t>{2, 2});
  REQUIRE(result.calls.size() == 3);
  CHECK(result.calls[0].label == "plan");
  CHECK(result.calls[1].step_index == 1);
  CHECK(result.calls[1].prompt.find(kEmptyHistoryMarker) != std::string::npos);
  CHECK(result.calls[2].prompt.find("Alpha paragraph.") != std::string::npos);
  CHECK(result.calls[2].prompt.find(kEmptyHistoryMarker) == std::string::npos);
}

TEST_CASE("parallel run isolates every step") {
  // Step replies race for the script, so rules keep the run order-independent.
  ScriptedBackend backend(mock_profile());
  backend.add_rule("break down", two_step_plan());
  backend.add_rule("", "Same paragraph.");

  const auto result = run_parallel(backend, make_instruction());
  CHECK(result.mode == GenerationMode::agentwrite_parallel);
  REQUIRE(result.calls.size() == 3);
  for (size_t i = 1; i < result.calls.size(); ++i) {
    CHECK(result.calls[i].prompt.find(kEmptyHistoryMarker) != std::string::npos);
  }
  CHECK(result.final_text == "Same paragraph.\n\nSame paragraph.");
  // calls arrive plan first, then steps in plan order regardless of timing
  CHECK(result.calls[1].step_index == 1);
  CHECK(result.calls[2].step_index == 2);
}

TEST_CASE("paragraph replies are cleaned of section markers") {
  ScriptedBackend backend(mock_profile());
  backend.push_replies({
      "Paragraph 1 - Main Point: Only step - Word Count: 300 words",
      "Paragraph 1: The actual content.  \n",
  });
  const auto result = run_sequential(backend, make_instruction());
  REQUIRE(result.paragraphs.size() == 1);
  CHECK(result.paragraphs[0] == "The actual content.");
}

TEST_CASE("empty paragraph is retried once, then fatal") {
  ScriptedBackend retried(mock_profile());
  retried.push_replies({
      "Paragraph 1 - Main Point: Only step - Word Count: 300 words",
      "   \n",          // cleans to empty, triggers the single retry
      "Recovered text.",
  });
  const auto ok = run_sequential(retried, make_instruction());
  CHECK(ok.paragraphs[0] == "Recovered text.");
  CHECK(ok.calls.size() == 3);  // plan + two write calls for the same step
  CHECK(ok.calls[1].step_index == ok.calls[2].step_index);

  ScriptedBackend failing(mock_profile());
  failing.push_replies({
      "Paragraph 1 - Main Point: Only step - Word Count: 300 words",
      "",
      "",
  });
  CHECK_THROWS_AS(run_sequential(failing, make_instruction()), EmptyParagraphError);
}

TEST_CASE("retry can be disabled") {
  ScriptedBackend backend(mock_profile());
  backend.push_replies({
      "Paragraph 1 - Main Point: Only step - Word Count: 300 words",
      "",
  });
  AgentWriteOptions options;
  options.retry_empty_paragraph = false;
  CHECK_THROWS_AS(run_sequential(backend, make_instruction(), options),
                  EmptyParagraphError);
}

TEST_CASE("truncation surfaces when any call stops at the cap") {
  ScriptedBackend backend(mock_profile());
  backend.push_reply(two_step_plan());
  ScriptedReply cut;
  cut.text = "Alpha paragraph.";
  cut.finish_reason = FinishReason::length;
  backend.push_reply(cut);
  backend.push_reply("Beta paragraph.");
  const auto result = run_sequential(backend, make_instruction());
  CHECK(result.truncated());
}

TEST_CASE("latency totals the per-call reported values") {
  ScriptedBackend backend(mock_profile());
  ScriptedReply plan;
  plan.text = two_step_plan();
  plan.latency_ms = 10;
  ScriptedReply a, b;
  a.text = "Alpha.";
  a.latency_ms = 20;
  b.text = "Beta.";
  b.latency_ms = 30;
  backend.push_reply(plan);
  backend.push_reply(a);
  backend.push_reply(b);
  const auto result = run_sequential(backend, make_instruction());
  CHECK(result.total_latency_ms() == 60);
}

TEST_CASE("oversized plans abort before any write call") {
  ScriptedBackend backend(mock_profile());
  backend.push_reply(testsupport::uniform_plan(8));
  AgentWriteOptions options;
  options.max_steps = 5;
  CHECK_THROWS_AS(run_sequential(backend, make_instruction(), options),
                  PlanParseError);
  CHECK(backend.request_count() == 1);  // only the plan call went out
}

}  // TEST_SUITE
