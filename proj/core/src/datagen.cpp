#include "longwrite/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "longwrite/agentwrite.hpp"
#include "longwrite/bench.hpp"
#include "longwrite/jsonl.hpp"
#include "longwrite/rng.hpp"
#include "longwrite/scoring.hpp"
#include "longwrite/textmetrics.hpp"
#include "longwrite/parallel.hpp"

namespace longwrite::datagen {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const char* kSelectionHead =
    "You will receive an instruction from a user to an AI assistant, please "
    "determine whether the instruction requires the AI assistant to write an "
    "article, and the length of the article is more than 2,000 words in "
    "English (or 2,000 characters in Chinese). If the instruction does not "
    "mention the word requirement, please determine whether the user's "
    "intention of the response length is more than 2,000 words.\n"
    "\n"
    "Instruction: ";

const char* kSelectionTail =
    "\n"
    "\n"
    "Please judge whether the instruction requires the AI assistant to write "
    "an article with more than 2000 words. If yes, please reply \"yes\", "
    "otherwise reply \"no\", and do not output any other content.";

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim_ascii(std::string_view s) {
  size_t begin = s.find_first_not_of(" \t\r\n\f\v");
  if (begin == std::string_view::npos) return {};
  size_t end = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(begin, end - begin + 1));
}

bool ci_equal(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view to_string(CandidateSource source) {
  switch (source) {
    case CandidateSource::corpus_a: return "corpus_a";
    case CandidateSource::corpus_b: return "corpus_b";
    case CandidateSource::custom: return "custom";
  }
  return "custom";
}

std::optional<CandidateSource> candidate_source_from_string(std::string_view s) {
  if (s == "corpus_a") return CandidateSource::corpus_a;
  if (s == "corpus_b") return CandidateSource::corpus_b;
  if (s == "custom") return CandidateSource::custom;
  return std::nullopt;
}

std::string_view to_string(SelectionVerdict verdict) {
  switch (verdict) {
    case SelectionVerdict::yes: return "yes";
    case SelectionVerdict::no: return "no";
    case SelectionVerdict::filtered_rule: return "filtered_rule";
  }
  return "no";
}

std::optional<SelectionVerdict> selection_verdict_from_string(std::string_view s) {
  if (s == "yes") return SelectionVerdict::yes;
  if (s == "no") return SelectionVerdict::no;
  if (s == "filtered_rule") return SelectionVerdict::filtered_rule;
  return std::nullopt;
}

std::string RuleFilters::match(std::string_view text) const {
  std::string lower = ascii_lower(text);
  for (const auto& needle : toxicity) {
    if (lower.find(ascii_lower(needle)) != std::string::npos) return "toxicity:" + needle;
  }
  for (const auto& needle : scraping) {
    if (lower.find(ascii_lower(needle)) != std::string::npos) return "scraping:" + needle;
  }
  return {};
}

RuleFilters load_rule_filters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open rules file: " + path.string());
  RuleFilters filters;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string trimmed = trim_ascii(line);
    if (trimmed.empty()) continue;
    size_t eq = trimmed.find('=');
    if (eq == std::string::npos) throw SchemaError("expected key = value", line_no);
    std::string key = trim_ascii(trimmed.substr(0, eq));
    std::string value = trim_ascii(trimmed.substr(eq + 1));
    if (value.empty()) throw SchemaError("empty filter pattern", line_no);
    if (key == "toxicity") {
      filters.toxicity.push_back(value);
    } else if (key == "scraping") {
      filters.scraping.push_back(value);
    } else {
      throw SchemaError("unknown filter key: " + key, line_no);
    }
  }
  return filters;
}

std::string build_selection_prompt(const std::string& instruction_text) {
  std::string prompt = kSelectionHead;
  prompt += instruction_text;
  prompt += kSelectionTail;
  return prompt;
}

SelectionOutcome select_instructions(Backend& judge,
                                     std::span<const CandidateInstruction> candidates,
                                     const RuleFilters& filters,
                                     const SelectionOptions& options) {
  SelectionOutcome outcome;
  outcome.candidates.reserve(candidates.size());
  outcome.details.reserve(candidates.size());
  std::map<CandidateSource, int> taken;

  for (const auto& input : candidates) {
    CandidateInstruction candidate = input;
    SelectionDetail detail;
    detail.candidate_id = candidate.id;

    std::string rule = filters.match(candidate.text);
    if (!rule.empty()) {
      candidate.selection_verdict = SelectionVerdict::filtered_rule;
      detail.matched_rule = rule;
    } else {
      std::string prompt = build_selection_prompt(candidate.text);
      std::optional<SelectionVerdict> verdict;
      for (int attempt = 0; attempt < options.max_judge_queries && !verdict; ++attempt) {
        ++detail.judge_queries;
        try {
          std::string reply = trim_ascii(judge.complete(prompt).text);
          if (ci_equal(reply, "yes")) {
            verdict = SelectionVerdict::yes;
          } else if (ci_equal(reply, "no")) {
            verdict = SelectionVerdict::no;
          }
        } catch (const std::exception& e) {
          detail.error = e.what();
          break;
        }
      }
      candidate.selection_verdict = verdict.value_or(SelectionVerdict::no);
    }

    if (candidate.selection_verdict == SelectionVerdict::yes) {
      auto quota = options.per_source_quota.find(candidate.source);
      bool within = quota == options.per_source_quota.end() || quota->second <= 0 ||
                    taken[candidate.source] < quota->second;
      if (within) {
        ++taken[candidate.source];
        outcome.selected.push_back(candidate);
      }
    }
    outcome.candidates.push_back(std::move(candidate));
    outcome.details.push_back(std::move(detail));
  }
  return outcome;
}

std::vector<CandidateInstruction> load_candidates(const std::filesystem::path& path) {
  std::vector<CandidateInstruction> candidates;
  std::vector<std::string> seen;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    CandidateInstruction candidate;
    try {
      candidate.id = entry.at("id").get<std::string>();
      std::string source = entry.at("source").get<std::string>();
      auto parsed_source = candidate_source_from_string(source);
      if (!parsed_source) throw SchemaError("unknown source: " + source, line_no);
      candidate.source = *parsed_source;
      std::string language = entry.at("language").get<std::string>();
      auto parsed_language = language_from_string(language);
      if (!parsed_language) throw SchemaError("unknown language: " + language, line_no);
      candidate.language = *parsed_language;
      candidate.text = entry.at("text").get<std::string>();
      if (entry.contains("selection_verdict") && !entry["selection_verdict"].is_null()) {
        std::string verdict = entry["selection_verdict"].get<std::string>();
        auto parsed_verdict = selection_verdict_from_string(verdict);
        if (!parsed_verdict) throw SchemaError("unknown selection_verdict: " + verdict, line_no);
        candidate.selection_verdict = *parsed_verdict;
      }
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }
    if (candidate.id.empty()) throw SchemaError("empty id", line_no);
    if (candidate.text.empty()) throw SchemaError("empty text", line_no);
    if (std::find(seen.begin(), seen.end(), candidate.id) != seen.end()) {
      throw SchemaError("duplicate id: " + candidate.id, line_no);
    }
    seen.push_back(candidate.id);
    candidates.push_back(std::move(candidate));
  });
  return candidates;
}

void save_candidates(const std::filesystem::path& path,
                     std::span<const CandidateInstruction> candidates) {
  std::string body;
  for (const auto& candidate : candidates) {
    ordered_json entry;
    entry["id"] = candidate.id;
    entry["source"] = to_string(candidate.source);
    entry["language"] = to_string(candidate.language);
    entry["text"] = candidate.text;
    if (candidate.selection_verdict) {
      entry["selection_verdict"] = to_string(*candidate.selection_verdict);
    }
    body += entry.dump();
    body += '\n';
  }
  write_file(path, body);
}

std::string_view to_string(SynthDropReason reason) {
  switch (reason) {
    case SynthDropReason::plan_parse_error: return "plan_parse_error";
    case SynthDropReason::too_many_steps: return "too_many_steps";
    case SynthDropReason::too_short: return "too_short";
    case SynthDropReason::empty_paragraph: return "empty_paragraph";
    case SynthDropReason::backend_error: return "backend_error";
  }
  return "backend_error";
}

SynthesisRun synthesize(Backend& backend,
                        std::span<const CandidateInstruction> selected,
                        const SynthesisOptions& options) {
  for (const auto& candidate : selected) {
    if (candidate.selection_verdict != SelectionVerdict::yes) {
      throw std::invalid_argument("candidate " + candidate.id +
                                  " lacks a yes verdict; run selection first");
    }
  }

  const size_t n = selected.size();
  std::vector<std::optional<SftRecord>> records(n);
  std::vector<std::optional<SynthDrop>> drops(n);

  parallel_for(n, backend.profile().max_concurrency, [&](size_t i) {
    const CandidateInstruction& candidate = selected[i];
    WritingInstruction instruction;
    instruction.id = candidate.id;
    instruction.language = candidate.language;
    instruction.text = candidate.text;
    instruction.required_length = options.min_output_length;

    agentwrite::AgentWriteOptions pipeline_options;
    pipeline_options.max_steps = options.max_steps;
    try {
      agentwrite::AgentWriteResult result =
          agentwrite::run_sequential(backend, instruction, pipeline_options);
      int64_t total = textmetrics::count_length(result.final_text, candidate.language).value;
      if (total < options.min_output_length) {
        drops[i] = SynthDrop{candidate.id, SynthDropReason::too_short,
                             "total length " + std::to_string(total) + " < " +
                                 std::to_string(options.min_output_length)};
        return;
      }
      SftRecord record;
      record.instruction = candidate.text;
      record.final_text = result.final_text;
      record.meta.source = candidate.source;
      record.meta.source_id = candidate.id;
      record.meta.language = candidate.language;
      record.meta.total_length = total;
      record.meta.paragraph_lengths = result.per_step_lengths;
      record.meta.plan_raw = result.plan.raw;
      record.meta.pipeline_version = std::string(kVersion);
      records[i] = std::move(record);
    } catch (const agentwrite::PlanParseError& e) {
      auto reason = e.kind() == agentwrite::PlanParseErrorKind::too_many_steps
                        ? SynthDropReason::too_many_steps
                        : SynthDropReason::plan_parse_error;
      drops[i] = SynthDrop{candidate.id, reason, e.what()};
    } catch (const agentwrite::EmptyParagraphError& e) {
      drops[i] = SynthDrop{candidate.id, SynthDropReason::empty_paragraph, e.what()};
    } catch (const std::exception& e) {
      drops[i] = SynthDrop{candidate.id, SynthDropReason::backend_error, e.what()};
    }
  });

  SynthesisRun run;
  for (size_t i = 0; i < n; ++i) {
    if (records[i]) run.records.push_back(std::move(*records[i]));
    if (drops[i]) run.drops.push_back(std::move(*drops[i]));
  }
  return run;
}

std::string sft_record_to_json(const SftRecord& record, bool plan_augmented) {
  std::string assistant = plan_augmented && !record.meta.plan_raw.empty()
                              ? record.meta.plan_raw + "\n\n" + record.final_text
                              : record.final_text;
  ordered_json entry;
  entry["messages"] = ordered_json::array({
      ordered_json{{"role", "user"}, {"content", record.instruction}},
      ordered_json{{"role", "assistant"}, {"content", assistant}},
  });
  ordered_json meta;
  meta["source"] = to_string(record.meta.source);
  meta["source_id"] = record.meta.source_id;
  meta["language"] = to_string(record.meta.language);
  meta["total_length"] = record.meta.total_length;
  meta["paragraph_lengths"] = record.meta.paragraph_lengths;
  meta["plan_raw"] = record.meta.plan_raw;
  meta["pipeline_version"] = record.meta.pipeline_version;
  meta["plan_augmented"] = plan_augmented;
  entry["meta"] = meta;
  return entry.dump();
}

void emit_sft(const std::filesystem::path& path, std::span<const SftRecord> records,
              bool plan_augmented) {
  std::string body;
  for (const auto& record : records) {
    body += sft_record_to_json(record, plan_augmented);
    body += '\n';
  }
  write_file(path, body);
}

std::vector<SftRecord> load_sft(const std::filesystem::path& path) {
  std::vector<SftRecord> records;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    SftRecord record;
    try {
      const json& messages = entry.at("messages");
      if (!messages.is_array() || messages.size() != 2 ||
          messages[0].at("role") != "user" || messages[1].at("role") != "assistant") {
        throw SchemaError("messages must be [user, assistant]", line_no);
      }
      record.instruction = messages[0].at("content").get<std::string>();
      std::string assistant = messages[1].at("content").get<std::string>();

      const json& meta = entry.at("meta");
      std::string source = meta.at("source").get<std::string>();
      auto parsed_source = candidate_source_from_string(source);
      if (!parsed_source) throw SchemaError("unknown source: " + source, line_no);
      record.meta.source = *parsed_source;
      record.meta.source_id = meta.at("source_id").get<std::string>();
      std::string language = meta.at("language").get<std::string>();
      auto parsed_language = language_from_string(language);
      if (!parsed_language) throw SchemaError("unknown language: " + language, line_no);
      record.meta.language = *parsed_language;
      record.meta.total_length = meta.at("total_length").get<int64_t>();
      record.meta.paragraph_lengths = meta.at("paragraph_lengths").get<std::vector<int64_t>>();
      record.meta.plan_raw = meta.value("plan_raw", std::string());
      record.meta.pipeline_version = meta.value("pipeline_version", std::string());

      bool plan_augmented = meta.value("plan_augmented", false);
      if (plan_augmented && !record.meta.plan_raw.empty()) {
        std::string prefix = record.meta.plan_raw + "\n\n";
        if (assistant.rfind(prefix, 0) != 0) {
          throw SchemaError("plan_augmented content does not start with the plan", line_no);
        }
        assistant.erase(0, prefix.size());
      }
      record.final_text = std::move(assistant);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }
    if (record.final_text.empty()) throw SchemaError("empty assistant content", line_no);
    records.push_back(std::move(record));
  });
  return records;
}

std::string_view to_string(DpoSkipReason reason) {
  switch (reason) {
    case DpoSkipReason::identical_samples: return "identical_samples";
    case DpoSkipReason::too_few_scored: return "too_few_scored";
    case DpoSkipReason::no_distinct_rejected: return "no_distinct_rejected";
  }
  return "too_few_scored";
}

DpoRun build_dpo_pairs(Backend& writer, Backend& judge,
                       std::span<const WritingInstruction> instructions,
                       const DpoOptions& options) {
  if (options.samples_per_instruction < 2) {
    throw std::invalid_argument("samples_per_instruction must be >= 2");
  }
  const int k = options.samples_per_instruction;
  const size_t n = instructions.size();
  std::vector<std::optional<DpoPair>> pairs(n);
  std::vector<std::optional<DpoSkip>> skips(n);

  parallel_for(n, writer.profile().max_concurrency, [&](size_t i) {
    const WritingInstruction& instruction = instructions[i];
    struct Sample {
      int index = 0;  // 1-based draw order
      std::string text;
      bool generated = false;
      double score = 0.0;
      bool scored = false;
    };
    std::vector<Sample> samples(static_cast<size_t>(k));
    int generated = 0;
    for (int j = 0; j < k; ++j) {
      samples[j].index = j + 1;
      try {
        samples[j].text = writer.complete(instruction.text).text;
        samples[j].generated = true;
        ++generated;
      } catch (const std::exception&) {
        // generation failure: the sample is simply unavailable for scoring
      }
    }

    if (generated == k) {
      bool all_identical = std::all_of(samples.begin(), samples.end(), [&](const Sample& s) {
        return s.text == samples[0].text;
      });
      if (all_identical) {
        skips[i] = DpoSkip{instruction.id, DpoSkipReason::identical_samples,
                           "all " + std::to_string(k) + " samples identical"};
        return;
      }
    }

    int scored = 0;
    for (auto& sample : samples) {
      if (!sample.generated) continue;
      try {
        GenerationRecord record;
        record.instruction_id = instruction.id;
        record.response = sample.text;
        record.measured_length =
            textmetrics::count_length(sample.text, instruction.language).value;
        bench::JudgeVerdict verdict =
            bench::judge_quality(judge, instruction, record, options.judge_max_attempts);
        double s_l = score_length(instruction.required_length, record.measured_length);
        sample.score = combine(s_l, score_quality(verdict.dims));
        sample.scored = true;
        ++scored;
      } catch (const std::exception&) {
        // judge failure: sample excluded
      }
    }

    if (scored < 2) {
      skips[i] = DpoSkip{instruction.id, DpoSkipReason::too_few_scored,
                         std::to_string(scored) + " of " + std::to_string(k) +
                             " samples scored"};
      return;
    }

    const Sample* chosen = nullptr;
    for (const auto& sample : samples) {
      if (!sample.scored) continue;
      if (chosen == nullptr || sample.score > chosen->score) chosen = &sample;
    }

    std::vector<const Sample*> eligible;
    for (const auto& sample : samples) {
      if (sample.scored && sample.text != chosen->text) eligible.push_back(&sample);
    }
    if (eligible.empty()) {
      skips[i] = DpoSkip{instruction.id, DpoSkipReason::no_distinct_rejected,
                         "every scored sample matches the chosen text"};
      return;
    }

    std::mt19937_64 gen(derive_seed(options.seed, instruction.id));
    const Sample* rejected = eligible[uniform_index(gen, eligible.size())];

    DpoPair pair;
    pair.instruction_id = instruction.id;
    pair.instruction = instruction.text;
    pair.chosen = chosen->text;
    pair.rejected = rejected->text;
    pair.chosen_score = chosen->score;
    pair.rejected_score = rejected->score;
    pair.sample_count = k;
    pairs[i] = std::move(pair);
  });

  DpoRun run;
  for (size_t i = 0; i < n; ++i) {
    if (pairs[i]) run.pairs.push_back(std::move(*pairs[i]));
    if (skips[i]) run.skips.push_back(std::move(*skips[i]));
  }
  return run;
}

void save_dpo_pairs(const std::filesystem::path& path, std::span<const DpoPair> pairs) {
  std::string body;
  for (const auto& pair : pairs) {
    ordered_json entry;
    entry["instruction_id"] = pair.instruction_id;
    entry["instruction"] = pair.instruction;
    entry["chosen"] = pair.chosen;
    entry["rejected"] = pair.rejected;
    entry["chosen_score"] = pair.chosen_score;
    entry["rejected_score"] = pair.rejected_score;
    entry["sample_count"] = pair.sample_count;
    body += entry.dump();
    body += '\n';
  }
  write_file(path, body);
}

std::vector<DpoPair> load_dpo_pairs(const std::filesystem::path& path) {
  std::vector<DpoPair> pairs;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    DpoPair pair;
    try {
      pair.instruction_id = entry.at("instruction_id").get<std::string>();
      pair.instruction = entry.at("instruction").get<std::string>();
      pair.chosen = entry.at("chosen").get<std::string>();
      pair.rejected = entry.at("rejected").get<std::string>();
      pair.chosen_score = entry.at("chosen_score").get<double>();
      pair.rejected_score = entry.at("rejected_score").get<double>();
      pair.sample_count = entry.at("sample_count").get<int>();
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }
    if (pair.chosen == pair.rejected) throw SchemaError("chosen equals rejected", line_no);
    if (pair.chosen_score < pair.rejected_score) {
      throw SchemaError("chosen_score below rejected_score", line_no);
    }
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

void save_drop_ledger(const std::filesystem::path& path,
                      std::span<const SynthDrop> synth_drops,
                      std::span<const DpoSkip> dpo_skips) {
  std::string body;
  for (const auto& drop : synth_drops) {
    ordered_json entry;
    entry["id"] = drop.candidate_id;
    entry["stage"] = "synth";
    entry["reason"] = to_string(drop.reason);
    entry["detail"] = drop.detail;
    body += entry.dump();
    body += '\n';
  }
  for (const auto& skip : dpo_skips) {
    ordered_json entry;
    entry["id"] = skip.instruction_id;
    entry["stage"] = "dpo";
    entry["reason"] = to_string(skip.reason);
    entry["detail"] = skip.detail;
    body += entry.dump();
    body += '\n';
  }
  write_file(path, body);
}

std::vector<LengthBin> length_distribution(std::span<const int64_t> lengths,
                                           int64_t bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("bin_width must be positive");
  std::map<int64_t, int> counts;
  for (int64_t length : lengths) {
    if (length < 0) throw std::invalid_argument("negative length");
    ++counts[length / bin_width];
  }
  std::vector<LengthBin> bins;
  bins.reserve(counts.size());
  for (const auto& [index, count] : counts) {
    bins.push_back(LengthBin{index * bin_width, (index + 1) * bin_width, count});
  }
  return bins;
}

std::vector<LengthBin> length_distribution(std::span<const SftRecord> records,
                                           int64_t bin_width) {
  std::vector<int64_t> lengths;
  lengths.reserve(records.size());
  for (const auto& record : records) lengths.push_back(record.meta.total_length);
  return length_distribution(std::span<const int64_t>(lengths), bin_width);
}

std::string distribution_csv(std::span<const LengthBin> bins) {
  std::ostringstream out;
  out << "bin_lower,bin_upper,count\n";
  for (const auto& bin : bins) {
    out << bin.lower << "," << bin.upper << "," << bin.count << "\n";
  }
  return out.str();
}

}  // namespace longwrite::datagen
