#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "longwrite/backend.hpp"
#include "longwrite/types.hpp"

namespace longwrite::agentwrite {

// Planned word-count range the plan prompt asks for. Steps outside it are
// kept but flagged; the planner model is advisory, not authoritative.
inline constexpr int64_t kStepWordsMin = 200;
inline constexpr int64_t kStepWordsMax = 1000;
inline constexpr int kDefaultMaxSteps = 50;

// Placeholder for the "already written text" slot before anything exists.
inline constexpr std::string_view kEmptyHistoryMarker = "(no text written yet)";

struct PlanStep {
  int index = 0;               // contiguous 1..n after reindexing
  std::string main_point;
  int64_t target_words = 0;
  bool out_of_range = false;   // outside [kStepWordsMin, kStepWordsMax]
  std::string source_line;     // the plan line verbatim, quoted in prompts
};

struct WritingPlan {
  std::string instruction_id;
  std::vector<PlanStep> steps;
  std::string raw;  // planner reply, unmodified
};

enum class PlanParseErrorKind { no_steps, too_many_steps };

class PlanParseError : public std::runtime_error {
 public:
  PlanParseError(PlanParseErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  PlanParseErrorKind kind() const { return kind_; }

 private:
  PlanParseErrorKind kind_;
};

class EmptyParagraphError : public std::runtime_error {
 public:
  EmptyParagraphError(int step_index, const std::string& message)
      : std::runtime_error(message), step_index_(step_index) {}
  int step_index() const { return step_index_; }

 private:
  int step_index_;
};

// Step-I prompt: the instruction text dropped into the planning template.
// Byte-stable for a given instruction.
std::string build_plan_prompt(const WritingInstruction& instruction);

// Pulls "Paragraph k - Main Point: ... - Word Count: N words" lines out of a
// planner reply. Tolerated variations: bracketed counts ("[400 words]"),
// full-width punctuation, "字" or a missing unit suffix, comma-grouped and
// full-width digits, markdown list/emphasis wrappers, and preamble or
// epilogue prose (ignored). Steps are reindexed to contiguous 1..n in order
// of appearance.
//
// Throws PlanParseError: no_steps when nothing parses, too_many_steps when
// more than max_steps lines parse.
WritingPlan parse_plan(const std::string& raw, int max_steps = kDefaultMaxSteps,
                       const std::string& instruction_id = {});

// Step-II prompt for `step`, with the full plan and all previously written
// paragraphs (cleaned) in the history slot. previous.size() must equal
// step.index - 1; the plan line itself is quoted verbatim in the "now
// continue writing" slot.
std::string build_write_prompt(const WritingInstruction& instruction,
                               const WritingPlan& plan,
                               std::span<const std::string> previous,
                               const PlanStep& step);

// Same template with the empty-history marker regardless of step index; the
// parallel mode sends these.
std::string build_write_prompt_isolated(const WritingInstruction& instruction,
                                        const WritingPlan& plan,
                                        const PlanStep& step);

struct CallTrace {
  std::string label;  // "plan" or "write"
  int step_index = 0; // 0 for the plan call
  std::string prompt;
  std::string response;
  FinishReason finish_reason = FinishReason::stop;
  int64_t latency_ms = 0;
};

struct AgentWriteResult {
  WritingPlan plan;
  std::vector<std::string> paragraphs;  // cleaned, one per step
  std::string final_text;               // paragraphs joined by "\n\n"
  GenerationMode mode = GenerationMode::agentwrite;
  std::vector<int64_t> per_step_lengths;
  std::vector<CallTrace> calls;         // plan first, then steps in plan order

  bool truncated() const;
  int64_t total_latency_ms() const;
};

struct AgentWriteOptions {
  int max_steps = kDefaultMaxSteps;
  // A step whose reply cleans down to nothing is re-asked once before
  // EmptyParagraphError is raised.
  bool retry_empty_paragraph = true;
};

// Plan, then write each paragraph in order, feeding every previous cleaned
// paragraph back as history. Exactly 1 + steps backend calls when no reply
// needs the empty-paragraph retry.
AgentWriteResult run_sequential(Backend& backend,
                                const WritingInstruction& instruction,
                                const AgentWriteOptions& options = {});

// Plan, then write all paragraphs concurrently with no history. Same call
// count as sequential; assembly order is plan order, not completion order.
AgentWriteResult run_parallel(Backend& backend,
                              const WritingInstruction& instruction,
                              const AgentWriteOptions& options = {});

}  // namespace longwrite::agentwrite
