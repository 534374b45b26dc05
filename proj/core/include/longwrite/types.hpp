#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace longwrite {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Language { en, zh };

std::string_view to_string(Language lang);
std::optional<Language> language_from_string(std::string_view s);

// Instruction categories used by the writing benchmark. Uncategorized is
// reserved for synthesis-only instructions that never enter a benchmark set.
enum class Category {
  literature_and_creative_writing,
  academic_and_monograph,
  popular_science,
  functional_writing,
  news_report,
  community_forum,
  education_and_training,
  uncategorized,
};

inline constexpr std::array<Category, 7> kBenchmarkCategories = {
    Category::literature_and_creative_writing,
    Category::academic_and_monograph,
    Category::popular_science,
    Category::functional_writing,
    Category::news_report,
    Category::community_forum,
    Category::education_and_training,
};

std::string_view to_string(Category cat);
std::optional<Category> category_from_string(std::string_view s);

struct WritingInstruction {
  std::string id;          // unique within a set
  Language language = Language::en;
  Category category = Category::uncategorized;
  std::string text;
  int64_t required_length = 0;  // words (en) or characters (zh), > 0
};

enum class GenerationMode { direct, agentwrite, agentwrite_parallel };

std::string_view to_string(GenerationMode mode);
std::optional<GenerationMode> generation_mode_from_string(std::string_view s);

struct GenerationRecord {
  std::string instruction_id;
  std::string model_id;
  GenerationMode mode = GenerationMode::direct;
  std::string response;
  int64_t measured_length = 0;  // counted in the instruction's unit
  int64_t wall_time_ms = 0;     // provider-reported latency, summed over calls
  bool truncated = false;       // any underlying call stopped at the token cap
};

// The six judge dimensions, in prompt order. Scores are integers in [1, 5].
inline constexpr std::array<std::string_view, 6> kQualityDimensions = {
    "Relevance", "Accuracy",          "Coherence",
    "Clarity",   "Breadth and Depth", "Reading Experience",
};

using DimScores = std::map<std::string, int>;

struct ScoreReport {
  std::string instruction_id;
  double s_l = 0.0;  // length score, [0, 100]
  DimScores dims;
  double s_q = 0.0;  // quality score, [0, 100]
  double s_bar = 0.0;
  std::string judge_raw;
};

}  // namespace longwrite
