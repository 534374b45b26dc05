#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "longwrite/backend.hpp"
#include "longwrite/types.hpp"

namespace longwrite::ruler {

// Probe suite for the maximum output length a model actually delivers: a
// small fixed set of seed prompts, each instantiated at several requested
// lengths, sent as plain single-turn completions.

inline constexpr int kSeedCount = 8;
inline constexpr int64_t kDefaultLengths[] = {1000, 2000, 5000, 10000, 20000, 30000};

// Replies shorter than this look like refusals; they are flagged and counted
// but still enter the means unchanged.
inline constexpr int64_t kRefusalSuspectBelow = 50;

struct RulerCase {
  int seed_index = 0;  // 1..kSeedCount
  Language language = Language::en;
  int64_t required_length = 0;
  std::string prompt;
};

// Cross product of the selected seeds and lengths, seed-major order. An empty
// seed filter selects all 8 seeds; indices outside 1..8 are an error.
std::vector<RulerCase> generate_suite(std::span<const int64_t> lengths = kDefaultLengths,
                                      std::span<const int> seed_filter = {});

struct RulerObservation {
  RulerCase test_case;
  bool failed = false;
  std::string error;          // set when failed
  std::string response;
  int64_t measured_length = 0;
  int64_t latency_ms = 0;
  bool truncated = false;
  bool refusal_suspect = false;
};

struct PerLengthStats {
  int64_t sum = 0;
  int count = 0;

  double mean() const { return count ? static_cast<double>(sum) / count : 0.0; }
};

struct RulerSummary {
  std::vector<RulerObservation> observations;  // suite order
  std::map<int64_t, PerLengthStats> per_length;
  int64_t max_output_length = 0;  // longest single reply seen
  int truncation_count = 0;
  int refusal_suspect_count = 0;
  int failure_count = 0;
};

// Runs every case as one direct completion (concurrently, bounded by the
// backend's gate). Per-case backend errors are recorded, never fatal; failed
// cases are excluded from the means.
RulerSummary run_suite(Backend& backend, std::span<const RulerCase> cases);

RulerSummary summarize(std::vector<RulerObservation> observations);

// CSV with one row per requested length: L, mean measured length, then one
// column per seed (blank when a seed was filtered out or failed). Means are
// printed with round-trip precision, so re-parsing reproduces them exactly.
std::string summary_csv(const RulerSummary& summary);

// GenerationRecords for persistence, "ruler-s<seed>-L<length>" ids.
std::vector<GenerationRecord> to_records(const RulerSummary& summary,
                                         const std::string& model_id);

}  // namespace longwrite::ruler
