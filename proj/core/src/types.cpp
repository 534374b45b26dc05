#include "longwrite/types.hpp"

namespace longwrite {

std::string_view to_string(Language lang) {
  return lang == Language::en ? "en" : "zh";
}

std::optional<Language> language_from_string(std::string_view s) {
  if (s == "en") return Language::en;
  if (s == "zh") return Language::zh;
  return std::nullopt;
}

namespace {
// Display names; these double as the wire values in JSONL files.
constexpr std::pair<Category, std::string_view> kCategoryNames[] = {
    {Category::literature_and_creative_writing, "Literature and Creative Writing"},
    {Category::academic_and_monograph, "Academic and Monograph"},
    {Category::popular_science, "Popular Science"},
    {Category::functional_writing, "Functional Writing"},
    {Category::news_report, "News Report"},
    {Category::community_forum, "Community Forum"},
    {Category::education_and_training, "Education and Training"},
    {Category::uncategorized, "Uncategorized"},
};
}  // namespace

std::string_view to_string(Category cat) {
  for (const auto& [c, name] : kCategoryNames) {
    if (c == cat) return name;
  }
  return "Uncategorized";
}

std::optional<Category> category_from_string(std::string_view s) {
  for (const auto& [c, name] : kCategoryNames) {
    if (name == s) return c;
  }
  return std::nullopt;
}

std::string_view to_string(GenerationMode mode) {
  switch (mode) {
    case GenerationMode::direct: return "direct";
    case GenerationMode::agentwrite: return "agentwrite";
    case GenerationMode::agentwrite_parallel: return "agentwrite_parallel";
  }
  return "direct";
}

std::optional<GenerationMode> generation_mode_from_string(std::string_view s) {
  if (s == "direct") return GenerationMode::direct;
  if (s == "agentwrite") return GenerationMode::agentwrite;
  if (s == "agentwrite_parallel") return GenerationMode::agentwrite_parallel;
  return std::nullopt;
}

}  // namespace longwrite
