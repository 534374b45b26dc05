#include "longwrite/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "longwrite/agentwrite.hpp"
#include "longwrite/jsonl.hpp"
#include "longwrite/textmetrics.hpp"
#include "longwrite/parallel.hpp"

namespace longwrite::bench {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const char* kJudgeHead =
    "You are an expert in evaluating text quality. Please evaluate the quality "
    "of an AI assistant's response to a user's writing request. Be as strict "
    "as possible.\n"
    "\n"
    "You need to evaluate across the following six dimensions, with scores "
    "ranging from 1 to 5. The scoring criteria from 5 to 1 for each dimension "
    "are as follows:\n"
    "\n"
    "1. Relevance: From content highly relevant and fully applicable to the "
    "user's request to completely irrelevant or inapplicable.\n"
    "\n"
    "2. Accuracy: From content completely accurate with no factual errors or "
    "misleading information to content with numerous errors and highly "
    "misleading.\n"
    "\n"
    "3. Coherence: From clear structure with smooth logical connections to "
    "disorganized structure with no coherence.\n"
    "\n"
    "4. Clarity: From clear language, rich in detail, and easy to understand "
    "to confusing expression with minimal details.\n"
    "\n"
    "5. Breadth and Depth: From both broad and deep content with a lot of "
    "information to seriously lacking breadth and depth with minimal "
    "information.\n"
    "\n"
    "6. Reading Experience: From excellent reading experience, engaging and "
    "easy to understand content to very poor reading experience, boring and "
    "hard to understand content.\n"
    "\n"
    "Please evaluate the quality of the following response to a user's "
    "request according to the above requirements.\n"
    "\n"
    "<User Request>\n"
    "\n";

const char* kJudgeMiddle =
    "\n"
    "\n"
    "</User Request>\n"
    "\n"
    "<Response>\n"
    "\n";

const char* kJudgeTail =
    "\n"
    "\n"
    "</Response>\n"
    "\n"
    "Please evaluate the quality of the response. You must first provide a "
    "brief analysis of its quality, then give a comprehensive analysis with "
    "scores for each dimension. The output must strictly follow the JSON "
    "format: {\"Analysis\": ..., \"Relevance\": ..., \"Accuracy\": ..., "
    "\"Coherence\": ..., \"Clarity\": ..., \"Breadth and Depth\": ..., "
    "\"Reading Experience\": ...}. You do not need to consider whether the "
    "response meets the user's length requirements in your evaluation. Ensure "
    "that only one integer between 1 and 5 is output for each dimension "
    "score.";

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

BenchmarkSet load_benchmark(const std::filesystem::path& path, bool canonical) {
  BenchmarkSet set;
  std::set<std::string> seen_ids;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    if (!entry.is_object()) throw SchemaError("entry is not an object", line_no);

    WritingInstruction instruction;
    try {
      instruction.id = entry.at("id").get<std::string>();
      std::string language = entry.at("language").get<std::string>();
      auto parsed_language = language_from_string(language);
      if (!parsed_language) throw SchemaError("unknown language: " + language, line_no);
      instruction.language = *parsed_language;
      instruction.text = entry.at("text").get<std::string>();
      instruction.required_length = entry.at("required_length").get<int64_t>();
      if (entry.contains("category") && !entry["category"].is_null()) {
        std::string category = entry["category"].get<std::string>();
        auto parsed_category = category_from_string(category);
        if (!parsed_category) throw SchemaError("unknown category: " + category, line_no);
        instruction.category = *parsed_category;
      } else {
        instruction.category = Category::uncategorized;
      }
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }

    if (instruction.id.empty()) throw SchemaError("empty id", line_no);
    if (!seen_ids.insert(instruction.id).second) {
      throw SchemaError("duplicate id: " + instruction.id, line_no);
    }
    if (instruction.text.empty()) throw SchemaError("empty text", line_no);
    if (instruction.required_length < 1 ||
        instruction.required_length >= kBucketBounds[kBucketCount]) {
      throw SchemaError("required_length " + std::to_string(instruction.required_length) +
                            " outside [1, " + std::to_string(kBucketBounds[kBucketCount]) + ")",
                        line_no);
    }
    set.instructions.push_back(std::move(instruction));
  });

  if (canonical) {
    if (static_cast<int>(set.instructions.size()) != kCanonicalTotal) {
      throw SchemaError("canonical set must hold " + std::to_string(kCanonicalTotal) +
                        " instructions, got " + std::to_string(set.instructions.size()));
    }
    std::map<Language, int> lang_counts;
    std::array<int, kBucketCount> bucket_counts{};
    std::map<Category, int> category_counts;
    for (const auto& instruction : set.instructions) {
      ++lang_counts[instruction.language];
      ++bucket_counts[bucket_of(instruction.required_length)];
      ++category_counts[instruction.category];
    }
    for (auto lang : {Language::en, Language::zh}) {
      if (lang_counts[lang] != kCanonicalPerLanguage) {
        throw SchemaError("canonical set needs " + std::to_string(kCanonicalPerLanguage) + " " +
                          std::string(to_string(lang)) + " instructions, got " +
                          std::to_string(lang_counts[lang]));
      }
    }
    for (int i = 0; i < kBucketCount; ++i) {
      if (bucket_counts[i] != kCanonicalBucketCounts[i]) {
        throw SchemaError("canonical set needs " + std::to_string(kCanonicalBucketCounts[i]) +
                          " instructions in " + buckets()[i].label() + ", got " +
                          std::to_string(bucket_counts[i]));
      }
    }
    if (category_counts.count(Category::uncategorized) != 0) {
      throw SchemaError("canonical set may not contain uncategorized instructions");
    }
    for (size_t i = 0; i < kBenchmarkCategories.size(); ++i) {
      Category cat = kBenchmarkCategories[i];
      if (category_counts[cat] != kCanonicalCategoryCounts[i]) {
        throw SchemaError("canonical set needs " + std::to_string(kCanonicalCategoryCounts[i]) +
                          " instructions in category \"" + std::string(to_string(cat)) +
                          "\", got " + std::to_string(category_counts[cat]));
      }
    }
  }
  return set;
}

GenerationRun run_generation(Backend& backend, const BenchmarkSet& set,
                             GenerationMode mode, const GenerationOptions& options) {
  const size_t n = set.instructions.size();
  std::vector<std::optional<GenerationRecord>> records(n);
  std::vector<std::optional<GenerationFailure>> failures(n);

  parallel_for(n, backend.profile().max_concurrency, [&](size_t i) {
    const WritingInstruction& instruction = set.instructions[i];
    bool pipeline = mode != GenerationMode::direct &&
                    instruction.required_length >= options.agentwrite_threshold;
    GenerationRecord record;
    record.instruction_id = instruction.id;
    record.model_id = backend.profile().model_id;
    try {
      if (pipeline) {
        agentwrite::AgentWriteOptions pipeline_options;
        pipeline_options.max_steps = options.max_steps;
        agentwrite::AgentWriteResult result =
            mode == GenerationMode::agentwrite_parallel
                ? agentwrite::run_parallel(backend, instruction, pipeline_options)
                : agentwrite::run_sequential(backend, instruction, pipeline_options);
        record.mode = mode;
        record.response = result.final_text;
        record.wall_time_ms = result.total_latency_ms();
        record.truncated = result.truncated();
      } else {
        CompletionResult reply = backend.complete(instruction.text);
        record.mode = GenerationMode::direct;
        record.response = reply.text;
        record.wall_time_ms = reply.latency_ms;
        record.truncated = reply.truncated();
      }
      record.measured_length =
          textmetrics::count_length(record.response, instruction.language).value;
      records[i] = std::move(record);
    } catch (const std::exception& e) {
      failures[i] = GenerationFailure{instruction.id, e.what()};
    }
  });

  GenerationRun run;
  for (size_t i = 0; i < n; ++i) {
    if (records[i]) run.records.push_back(std::move(*records[i]));
    if (failures[i]) run.failures.push_back(std::move(*failures[i]));
  }
  return run;
}

std::string build_judge_prompt(const WritingInstruction& instruction,
                               const std::string& response) {
  std::string prompt = kJudgeHead;
  prompt += instruction.text;
  prompt += kJudgeMiddle;
  prompt += response;
  prompt += kJudgeTail;
  return prompt;
}

std::optional<std::string> extract_json_object(std::string_view text) {
  size_t start = 0;
  while ((start = text.find('{', start)) != std::string_view::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          std::string candidate(text.substr(start, i - start + 1));
          if (json::accept(candidate)) return candidate;
          break;  // balanced but invalid JSON, try the next opening brace
        }
      }
    }
    ++start;
  }
  return std::nullopt;
}

std::optional<JudgeVerdict> try_parse_verdict(std::string_view reply) {
  auto object_text = extract_json_object(reply);
  if (!object_text) return std::nullopt;
  json object = json::parse(*object_text);
  if (!object.is_object()) return std::nullopt;

  JudgeVerdict verdict;
  for (const auto& dim : kQualityDimensions) {
    std::string key(dim);
    if (!object.contains(key)) return std::nullopt;
    const json& value = object[key];
    int score = 0;
    if (value.is_number_integer()) {
      score = value.get<int>();
    } else if (value.is_number_float()) {
      double d = value.get<double>();
      if (d != static_cast<int>(d)) return std::nullopt;
      score = static_cast<int>(d);
    } else {
      return std::nullopt;
    }
    if (score < 1 || score > 5) return std::nullopt;
    verdict.dims[key] = score;
  }
  if (object.contains("Analysis") && object["Analysis"].is_string()) {
    verdict.analysis = object["Analysis"].get<std::string>();
  }
  verdict.raw = std::string(reply);
  return verdict;
}

JudgeVerdict judge_quality(Backend& judge, const WritingInstruction& instruction,
                           const GenerationRecord& record, int max_attempts) {
  if (record.response.empty()) {
    throw JudgeError(JudgeErrorKind::empty_response,
                     "refusing to judge empty response for " + record.instruction_id);
  }
  std::string prompt = build_judge_prompt(instruction, record.response);
  std::string last_reply;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    last_reply = judge.complete(prompt).text;
    if (auto verdict = try_parse_verdict(last_reply)) {
      verdict->instruction_id = record.instruction_id;
      verdict->parse_attempts = attempt;
      return std::move(*verdict);
    }
  }
  throw JudgeError(JudgeErrorKind::parse_exhausted,
                   "judge reply for " + record.instruction_id + " failed to parse after " +
                       std::to_string(max_attempts) + " attempts");
}

std::vector<ScoreReport> score_rows(const BenchmarkSet& set,
                                    std::span<const GenerationRecord> records,
                                    std::span<const JudgeVerdict> verdicts) {
  std::map<std::string, const GenerationRecord*> record_by_id;
  for (const auto& record : records) record_by_id[record.instruction_id] = &record;
  std::map<std::string, const JudgeVerdict*> verdict_by_id;
  for (const auto& verdict : verdicts) verdict_by_id[verdict.instruction_id] = &verdict;

  std::vector<ScoreReport> rows;
  for (const auto& instruction : set.instructions) {
    auto record_it = record_by_id.find(instruction.id);
    auto verdict_it = verdict_by_id.find(instruction.id);
    if (record_it == record_by_id.end() || verdict_it == verdict_by_id.end()) continue;
    ScoreReport row;
    row.instruction_id = instruction.id;
    row.s_l = score_length(instruction.required_length, record_it->second->measured_length);
    row.dims = verdict_it->second->dims;
    row.s_q = score_quality(row.dims);
    row.s_bar = combine(row.s_l, row.s_q);
    row.judge_raw = verdict_it->second->raw;
    rows.push_back(std::move(row));
  }
  return rows;
}

AggregateReport aggregate(const BenchmarkSet& set,
                          std::span<const GenerationRecord> records,
                          std::span<const JudgeVerdict> verdicts) {
  std::map<std::string, const WritingInstruction*> instruction_by_id;
  for (const auto& instruction : set.instructions) {
    instruction_by_id[instruction.id] = &instruction;
  }

  struct Sums {
    double s_l = 0, s_q = 0, s_bar = 0;
    int count = 0;
    void add(const ScoreReport& row) {
      s_l += row.s_l;
      s_q += row.s_q;
      s_bar += row.s_bar;
      ++count;
    }
    GroupScores mean() const {
      if (count == 0) return {};
      return {s_l / count, s_q / count, s_bar / count, count};
    }
  };

  Sums overall;
  std::array<Sums, kBucketCount> per_bucket;
  std::map<Category, Sums> per_category;
  std::map<Language, Sums> per_language;

  std::vector<ScoreReport> rows = score_rows(set, records, verdicts);
  for (const auto& row : rows) {
    const WritingInstruction& instruction = *instruction_by_id.at(row.instruction_id);
    overall.add(row);
    per_bucket[bucket_of(instruction.required_length)].add(row);
    per_category[instruction.category].add(row);
    per_language[instruction.language].add(row);
  }

  AggregateReport report;
  report.overall = overall.mean();
  for (int i = 0; i < kBucketCount; ++i) report.per_bucket[i] = per_bucket[i].mean();
  for (const auto& [category, sums] : per_category) {
    report.per_category[category] = sums.mean();
  }
  for (const auto& [language, sums] : per_language) {
    report.per_language[language] = sums.mean();
  }
  report.scored_count = overall.count;
  report.excluded_count = static_cast<int>(set.instructions.size()) - overall.count;

  // Length statistics come from every record, not only the judged ones.
  std::array<std::vector<int64_t>, kBucketCount> lengths;
  for (const auto& record : records) {
    auto it = instruction_by_id.find(record.instruction_id);
    if (it == instruction_by_id.end()) continue;
    lengths[bucket_of(it->second->required_length)].push_back(record.measured_length);
  }
  for (int i = 0; i < kBucketCount; ++i) {
    auto& values = lengths[i];
    LengthStats stats;
    stats.count = static_cast<int>(values.size());
    if (!values.empty()) {
      std::sort(values.begin(), values.end());
      int64_t sum = 0;
      for (int64_t v : values) sum += v;
      stats.mean = static_cast<double>(sum) / static_cast<double>(values.size());
      size_t mid = values.size() / 2;
      stats.median = values.size() % 2 == 1
                         ? static_cast<double>(values[mid])
                         : (static_cast<double>(values[mid - 1]) + static_cast<double>(values[mid])) / 2.0;
    }
    report.per_bucket_lengths[i] = stats;
  }
  return report;
}

namespace {

std::string cell(const GroupScores& g, double GroupScores::* field) {
  return g.count == 0 ? "-" : fmt1(g.*field);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_markdown(const AggregateReport& report) {
  std::ostringstream out;
  auto bucket_labels = buckets();

  out << "# Writing benchmark report\n\n";
  out << "## Scores\n\n";
  out << "| Group | Count | S_bar | S_l | S_q |\n";
  out << "|---|---:|---:|---:|---:|\n";
  out << "| Overall | " << report.overall.count << " | " << cell(report.overall, &GroupScores::s_bar)
      << " | " << cell(report.overall, &GroupScores::s_l) << " | "
      << cell(report.overall, &GroupScores::s_q) << " |\n";
  for (int i = 0; i < kBucketCount; ++i) {
    const GroupScores& g = report.per_bucket[i];
    out << "| " << bucket_labels[i].label() << " | " << g.count << " | "
        << cell(g, &GroupScores::s_bar) << " | " << cell(g, &GroupScores::s_l) << " | "
        << cell(g, &GroupScores::s_q) << " |\n";
  }

  out << "\n## Scores by category\n\n";
  out << "| Category | Count | S_bar | S_l | S_q |\n";
  out << "|---|---:|---:|---:|---:|\n";
  for (const auto& [category, g] : report.per_category) {
    out << "| " << to_string(category) << " | " << g.count << " | "
        << cell(g, &GroupScores::s_bar) << " | " << cell(g, &GroupScores::s_l) << " | "
        << cell(g, &GroupScores::s_q) << " |\n";
  }

  out << "\n## Scores by language\n\n";
  out << "| Language | Count | S_bar | S_l | S_q |\n";
  out << "|---|---:|---:|---:|---:|\n";
  for (const auto& [language, g] : report.per_language) {
    out << "| " << to_string(language) << " | " << g.count << " | "
        << cell(g, &GroupScores::s_bar) << " | " << cell(g, &GroupScores::s_l) << " | "
        << cell(g, &GroupScores::s_q) << " |\n";
  }

  out << "\n## Response lengths\n\n";
  out << "| Required length | Count | Mean | Median |\n";
  out << "|---|---:|---:|---:|\n";
  for (int i = 0; i < kBucketCount; ++i) {
    const LengthStats& stats = report.per_bucket_lengths[i];
    out << "| " << bucket_labels[i].label() << " | " << stats.count << " | "
        << (stats.count == 0 ? "-" : fmt1(stats.mean)) << " | "
        << (stats.count == 0 ? "-" : fmt1(stats.median)) << " |\n";
  }

  out << "\nScored " << report.scored_count << " instructions, excluded "
      << report.excluded_count << ".\n";
  return out.str();
}

std::string render_csv(const AggregateReport& report) {
  std::ostringstream out;
  auto bucket_labels = buckets();

  out << "group,count,s_bar,s_l,s_q\n";
  out << "Overall," << report.overall.count << "," << cell(report.overall, &GroupScores::s_bar)
      << "," << cell(report.overall, &GroupScores::s_l) << ","
      << cell(report.overall, &GroupScores::s_q) << "\n";
  for (int i = 0; i < kBucketCount; ++i) {
    const GroupScores& g = report.per_bucket[i];
    out << csv_quote(bucket_labels[i].label()) << "," << g.count << ","
        << cell(g, &GroupScores::s_bar) << "," << cell(g, &GroupScores::s_l) << ","
        << cell(g, &GroupScores::s_q) << "\n";
  }
  for (const auto& [category, g] : report.per_category) {
    out << csv_quote(std::string(to_string(category))) << "," << g.count << ","
        << cell(g, &GroupScores::s_bar) << "," << cell(g, &GroupScores::s_l) << ","
        << cell(g, &GroupScores::s_q) << "\n";
  }
  for (const auto& [language, g] : report.per_language) {
    out << to_string(language) << "," << g.count << "," << cell(g, &GroupScores::s_bar) << ","
        << cell(g, &GroupScores::s_l) << "," << cell(g, &GroupScores::s_q) << "\n";
  }

  out << "\nbucket,count,mean_length,median_length\n";
  for (int i = 0; i < kBucketCount; ++i) {
    const LengthStats& stats = report.per_bucket_lengths[i];
    out << csv_quote(bucket_labels[i].label()) << "," << stats.count << ","
        << (stats.count == 0 ? "-" : fmt1(stats.mean)) << ","
        << (stats.count == 0 ? "-" : fmt1(stats.median)) << "\n";
  }
  return out.str();
}

std::string record_to_json(const GenerationRecord& record) {
  ordered_json entry;
  entry["instruction_id"] = record.instruction_id;
  entry["model_id"] = record.model_id;
  entry["mode"] = to_string(record.mode);
  entry["response"] = record.response;
  entry["measured_length"] = record.measured_length;
  entry["wall_time_ms"] = record.wall_time_ms;
  entry["truncated"] = record.truncated;
  return entry.dump();
}

std::string verdict_to_json(const JudgeVerdict& verdict) {
  ordered_json entry;
  entry["instruction_id"] = verdict.instruction_id;
  entry["analysis"] = verdict.analysis;
  ordered_json dims;
  for (const auto& dim : kQualityDimensions) {
    dims[std::string(dim)] = verdict.dims.at(std::string(dim));
  }
  entry["dims"] = dims;
  entry["parse_attempts"] = verdict.parse_attempts;
  entry["raw"] = verdict.raw;
  return entry.dump();
}

void save_records(const std::filesystem::path& path,
                  std::span<const GenerationRecord> records) {
  std::string body;
  for (const auto& record : records) {
    body += record_to_json(record);
    body += '\n';
  }
  write_file(path, body);
}

std::vector<GenerationRecord> load_records(const std::filesystem::path& path) {
  std::vector<GenerationRecord> records;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    GenerationRecord record;
    try {
      record.instruction_id = entry.at("instruction_id").get<std::string>();
      record.model_id = entry.value("model_id", std::string());
      std::string mode = entry.at("mode").get<std::string>();
      auto parsed_mode = generation_mode_from_string(mode);
      if (!parsed_mode) throw SchemaError("unknown mode: " + mode, line_no);
      record.mode = *parsed_mode;
      record.response = entry.at("response").get<std::string>();
      record.measured_length = entry.at("measured_length").get<int64_t>();
      record.wall_time_ms = entry.value("wall_time_ms", int64_t{0});
      record.truncated = entry.value("truncated", false);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }
    if (record.measured_length < 0) throw SchemaError("negative measured_length", line_no);
    records.push_back(std::move(record));
  });
  return records;
}

void save_verdicts(const std::filesystem::path& path,
                   std::span<const JudgeVerdict> verdicts) {
  std::string body;
  for (const auto& verdict : verdicts) {
    body += verdict_to_json(verdict);
    body += '\n';
  }
  write_file(path, body);
}

std::vector<JudgeVerdict> load_verdicts(const std::filesystem::path& path) {
  std::vector<JudgeVerdict> verdicts;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    JudgeVerdict verdict;
    try {
      verdict.instruction_id = entry.at("instruction_id").get<std::string>();
      verdict.analysis = entry.value("analysis", std::string());
      const json& dims = entry.at("dims");
      for (const auto& dim : kQualityDimensions) {
        int score = dims.at(std::string(dim)).get<int>();
        if (score < 1 || score > 5) {
          throw SchemaError("dimension " + std::string(dim) + " outside [1,5]", line_no);
        }
        verdict.dims[std::string(dim)] = score;
      }
      verdict.parse_attempts = entry.value("parse_attempts", 1);
      verdict.raw = entry.value("raw", std::string());
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }
    verdicts.push_back(std::move(verdict));
  });
  return verdicts;
}

}  // namespace longwrite::bench
