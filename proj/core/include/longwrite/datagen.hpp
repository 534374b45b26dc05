#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longwrite/backend.hpp"
#include "longwrite/types.hpp"

namespace longwrite::datagen {

enum class CandidateSource { corpus_a, corpus_b, custom };
std::string_view to_string(CandidateSource source);
std::optional<CandidateSource> candidate_source_from_string(std::string_view s);

enum class SelectionVerdict { yes, no, filtered_rule };
std::string_view to_string(SelectionVerdict verdict);
std::optional<SelectionVerdict> selection_verdict_from_string(std::string_view s);

struct CandidateInstruction {
  std::string id;
  CandidateSource source = CandidateSource::custom;
  Language language = Language::en;
  std::string text;
  std::optional<SelectionVerdict> selection_verdict;  // unset until judged

  friend bool operator==(const CandidateInstruction&, const CandidateInstruction&) = default;
};

// Keyword filters applied before the selection judge ever sees a candidate.
// Potentially sensitive needles live in config files, not in code.
struct RuleFilters {
  std::vector<std::string> toxicity;
  std::vector<std::string> scraping;

  // Case-insensitive (ASCII) substring match; returns "toxicity:<needle>" or
  // "scraping:<needle>" for the first hit, empty when clean.
  std::string match(std::string_view text) const;
};

// Lines of "toxicity = <needle>" / "scraping = <needle>", repeatable, with
// '#' comments. Unknown keys are errors.
RuleFilters load_rule_filters(const std::filesystem::path& path);

// The yes/no length-intent question around the candidate text.
std::string build_selection_prompt(const std::string& instruction_text);

struct SelectionDetail {
  std::string candidate_id;
  int judge_queries = 0;     // 0 when a rule filter short-circuited
  std::string matched_rule;  // from RuleFilters::match
  std::string error;         // backend error text, verdict forced to no
};

struct SelectionOptions {
  // Cap on selected candidates per source, applied in input order after
  // judging; 0 or absent means unlimited.
  std::map<CandidateSource, int> per_source_quota;
  int max_judge_queries = 2;
};

struct SelectionOutcome {
  std::vector<CandidateInstruction> candidates;  // input order, verdicts set
  std::vector<CandidateInstruction> selected;    // yes verdicts within quota
  std::vector<SelectionDetail> details;          // input order
};

// Rule filters first (judge never called on a hit), then the yes/no judge.
// Only a trimmed, case-insensitive, exact "yes" or "no" counts as an answer;
// anything else earns one identical re-query and then defaults to no.
SelectionOutcome select_instructions(Backend& judge,
                                     std::span<const CandidateInstruction> candidates,
                                     const RuleFilters& filters,
                                     const SelectionOptions& options = {});

std::vector<CandidateInstruction> load_candidates(const std::filesystem::path& path);
void save_candidates(const std::filesystem::path& path,
                     std::span<const CandidateInstruction> candidates);

struct SftMeta {
  CandidateSource source = CandidateSource::custom;
  std::string source_id;
  Language language = Language::en;
  int64_t total_length = 0;  // count_length of final_text
  std::vector<int64_t> paragraph_lengths;
  std::string plan_raw;
  std::string pipeline_version;

  friend bool operator==(const SftMeta&, const SftMeta&) = default;
};

struct SftRecord {
  std::string instruction;
  std::string final_text;  // cleaned paragraphs joined by blank lines
  SftMeta meta;

  friend bool operator==(const SftRecord&, const SftRecord&) = default;
};

enum class SynthDropReason {
  plan_parse_error,
  too_many_steps,
  too_short,
  empty_paragraph,
  backend_error,
};
std::string_view to_string(SynthDropReason reason);

struct SynthDrop {
  std::string candidate_id;
  SynthDropReason reason = SynthDropReason::backend_error;
  std::string detail;
};

struct SynthesisOptions {
  int64_t min_output_length = 2000;
  int max_steps = 50;
};

struct SynthesisRun {
  std::vector<SftRecord> records;  // input order, dropped candidates omitted
  std::vector<SynthDrop> drops;    // input order
};

// Sequential plan-then-write per candidate, fanned out across candidates up
// to the backend's max_concurrency. Every input ends up in exactly one of
// records or drops. Candidates must carry a yes verdict.
SynthesisRun synthesize(Backend& backend,
                        std::span<const CandidateInstruction> selected,
                        const SynthesisOptions& options = {});

// Chat-format JSONL. plan_augmented prepends the raw plan to the assistant
// content, separated by one blank line; the flag is recorded in meta so
// load_sft can peel the plan back off and round-trip exactly.
void emit_sft(const std::filesystem::path& path, std::span<const SftRecord> records,
              bool plan_augmented);
std::vector<SftRecord> load_sft(const std::filesystem::path& path);
std::string sft_record_to_json(const SftRecord& record, bool plan_augmented);

struct DpoPair {
  std::string instruction_id;
  std::string instruction;
  std::string chosen;
  std::string rejected;
  double chosen_score = 0.0;
  double rejected_score = 0.0;
  int sample_count = 0;

  friend bool operator==(const DpoPair&, const DpoPair&) = default;
};

enum class DpoSkipReason { identical_samples, too_few_scored, no_distinct_rejected };
std::string_view to_string(DpoSkipReason reason);

struct DpoSkip {
  std::string instruction_id;
  DpoSkipReason reason = DpoSkipReason::too_few_scored;
  std::string detail;
};

struct DpoOptions {
  int samples_per_instruction = 4;  // k, must be >= 2
  int judge_max_attempts = 3;
  uint64_t seed = 0;
};

struct DpoRun {
  std::vector<DpoPair> pairs;   // input order, skipped instructions omitted
  std::vector<DpoSkip> skips;   // input order
};

// k direct completions per instruction, each scored combine(length score,
// judge quality). Chosen is the best (earliest index on ties); rejected is
// drawn uniformly from the remaining scored samples whose text differs from
// the chosen one, using a generator seeded from (seed, instruction id) so
// the draw is independent of scheduling. Skips: all k samples identical,
// fewer than 2 samples scored (generation or judge failures), or no
// remaining sample textually distinct from the chosen.
DpoRun build_dpo_pairs(Backend& writer, Backend& judge,
                       std::span<const WritingInstruction> instructions,
                       const DpoOptions& options = {});

void save_dpo_pairs(const std::filesystem::path& path, std::span<const DpoPair> pairs);
std::vector<DpoPair> load_dpo_pairs(const std::filesystem::path& path);

// Drop ledger JSONL shared by synth and dpo stages.
void save_drop_ledger(const std::filesystem::path& path,
                      std::span<const SynthDrop> synth_drops,
                      std::span<const DpoSkip> dpo_skips);

struct LengthBin {
  int64_t lower = 0;
  int64_t upper = 0;  // exclusive
  int count = 0;

  friend bool operator==(const LengthBin&, const LengthBin&) = default;
};

// Fixed-width histogram over meta.total_length; only occupied bins appear,
// in ascending order. bin_width must be positive.
std::vector<LengthBin> length_distribution(std::span<const SftRecord> records,
                                           int64_t bin_width = 500);
std::vector<LengthBin> length_distribution(std::span<const int64_t> lengths,
                                           int64_t bin_width = 500);
std::string distribution_csv(std::span<const LengthBin> bins);

}  // namespace longwrite::datagen
