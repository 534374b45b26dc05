#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longwrite/backend.hpp"
#include "longwrite/scoring.hpp"
#include "longwrite/types.hpp"

namespace longwrite::bench {

struct BenchmarkSet {
  std::vector<WritingInstruction> instructions;
};

// Shape of the canonical 120-instruction benchmark; load_benchmark checks
// these when asked to treat a file as canonical.
inline constexpr int kCanonicalTotal = 120;
inline constexpr int kCanonicalPerLanguage = 60;
inline constexpr std::array<int, kBucketCount> kCanonicalBucketCounts = {26, 36, 31, 27};
inline constexpr std::array<int, 7> kCanonicalCategoryCounts = {31, 22, 18, 17, 13, 10, 9};

// Reads instruction JSONL ({"id","language","category","text",
// "required_length"}). Raises SchemaError with the offending line for
// malformed entries, duplicate ids, required_length outside [1, 20000), or,
// with canonical=true, any deviation from the canonical counts above.
BenchmarkSet load_benchmark(const std::filesystem::path& path, bool canonical = false);

inline constexpr int64_t kDefaultAgentWriteThreshold = 2000;

struct GenerationOptions {
  int64_t agentwrite_threshold = kDefaultAgentWriteThreshold;
  int max_steps = 50;
};

struct GenerationFailure {
  std::string instruction_id;
  std::string error;
};

struct GenerationRun {
  std::vector<GenerationRecord> records;    // benchmark order, failures omitted
  std::vector<GenerationFailure> failures;  // benchmark order
};

// Runs the whole set. direct sends each instruction as a single user turn.
// The agentwrite modes route instructions with required_length >=
// agentwrite_threshold through the plan-then-write pipeline and the rest
// through direct completion; each record's mode field reports the path
// actually taken. Per-instruction failures never abort the run.
GenerationRun run_generation(Backend& backend, const BenchmarkSet& set,
                             GenerationMode mode,
                             const GenerationOptions& options = {});

// Judge prompt: the instruction text and the response dropped into the
// six-dimension rubric template. Nothing else is injected; in particular no
// length measurements or targets.
std::string build_judge_prompt(const WritingInstruction& instruction,
                               const std::string& response);

struct JudgeVerdict {
  std::string instruction_id;
  std::string analysis;
  DimScores dims;          // the six names in kQualityDimensions
  int parse_attempts = 1;  // queries needed before a reply parsed
  std::string raw;         // last judge reply
};

enum class JudgeErrorKind { empty_response, parse_exhausted };

class JudgeError : public std::runtime_error {
 public:
  JudgeError(JudgeErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  JudgeErrorKind kind() const { return kind_; }

 private:
  JudgeErrorKind kind_;
};

// First balanced JSON object in text, tolerant of code fences and prose
// around it. Candidates that do not parse as JSON are skipped.
std::optional<std::string> extract_json_object(std::string_view text);

// Parses a judge reply: six integer dimensions in [1,5], analysis if present.
std::optional<JudgeVerdict> try_parse_verdict(std::string_view reply);

// Queries the judge, re-asking with the identical prompt on parse or
// validation failure, up to max_attempts queries in total. Throws JudgeError
// (empty_response for an empty record, parse_exhausted after the last bad
// reply); backend errors pass through.
JudgeVerdict judge_quality(Backend& judge, const WritingInstruction& instruction,
                           const GenerationRecord& record, int max_attempts = 3);

struct GroupScores {
  double s_l = 0.0;
  double s_q = 0.0;
  double s_bar = 0.0;
  int count = 0;
};

struct LengthStats {
  double mean = 0.0;
  double median = 0.0;
  int count = 0;
};

struct AggregateReport {
  GroupScores overall;
  std::array<GroupScores, kBucketCount> per_bucket;
  std::map<Category, GroupScores> per_category;
  std::map<Language, GroupScores> per_language;
  std::array<LengthStats, kBucketCount> per_bucket_lengths;
  int scored_count = 0;
  int excluded_count = 0;  // instructions lacking a record or a verdict
};

// Per-instruction score rows for instructions that have both a record and a
// verdict, in benchmark order.
std::vector<ScoreReport> score_rows(const BenchmarkSet& set,
                                    std::span<const GenerationRecord> records,
                                    std::span<const JudgeVerdict> verdicts);

// Unweighted means per bucket, category, and language. Length statistics are
// computed from all records, judged or not.
AggregateReport aggregate(const BenchmarkSet& set,
                          std::span<const GenerationRecord> records,
                          std::span<const JudgeVerdict> verdicts);

// One-decimal display rendering; markdown and CSV carry identical numbers.
std::string render_markdown(const AggregateReport& report);
std::string render_csv(const AggregateReport& report);

// JSONL persistence for the two-phase CLI (generate, then judge, then report).
void save_records(const std::filesystem::path& path,
                  std::span<const GenerationRecord> records);
std::vector<GenerationRecord> load_records(const std::filesystem::path& path);
void save_verdicts(const std::filesystem::path& path,
                   std::span<const JudgeVerdict> verdicts);
std::vector<JudgeVerdict> load_verdicts(const std::filesystem::path& path);

std::string record_to_json(const GenerationRecord& record);
std::string verdict_to_json(const JudgeVerdict& verdict);

}  // namespace longwrite::bench
