#include "longwrite/agentwrite.hpp"

#include <cctype>
#include <exception>
#include <thread>

#include "longwrite/textmetrics.hpp"
#include "longwrite/utf8.hpp"

namespace longwrite::agentwrite {

namespace {

constexpr std::string_view kPlanHead =
    "I need you to help me break down the following long-form writing "
    "instruction into multiple subtasks. Each subtask will guide the writing "
    "of one paragraph in the essay, and should include the main points and "
    "word count requirements for that paragraph.\n\nThe writing instruction "
    "is as follows:\n\n";

constexpr std::string_view kPlanTail =
    "\n\nPlease break it down in the following format, with each subtask "
    "taking up one line:\n\nParagraph 1 - Main Point: [Describe the main "
    "point of the paragraph, in detail] - Word Count: [Word count "
    "requirement, e.g., 400 words]\n\nParagraph 2 - Main Point: [Describe "
    "the main point of the paragraph, in detail] - Word Count: [word count "
    "requirement, e.g. 1000 words].\n\n...\n\nMake sure that each subtask is "
    "clear and specific, and that all subtasks cover the entire content of "
    "the writing instruction. Do not split the subtasks too finely; each "
    "subtask's paragraph should be no less than 200 words and no more than "
    "1000 words. Do not output any other content.";

constexpr std::string_view kWriteHead =
    "You are an excellent writing assistant. I will give you an original "
    "writing instruction and my planned writing steps. I will also provide "
    "you with the text I have already written. Please help me continue "
    "writing the next paragraph based on the writing instruction, writing "
    "steps, and the already written text.\n\nWriting instruction:\n\n";

constexpr std::string_view kWriteSteps = "\n\nWriting steps:\n\n";
constexpr std::string_view kWriteHistory = "\n\nAlready written text:\n\n";

constexpr std::string_view kWriteAsk =
    "\n\nPlease integrate the original writing instruction, writing steps, "
    "and the already written text, and now continue writing ";

constexpr std::string_view kWriteTail =
    " for me. If needed, you can add a small subtitle at the beginning. "
    "Remember to only output the paragraph you write, without repeating the "
    "already written text.";

std::string trim_ws(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool ci_at(std::string_view s, size_t pos, std::string_view lower_word) {
  if (pos + lower_word.size() > s.size()) return false;
  for (size_t i = 0; i < lower_word.size(); ++i) {
    // compare as unsigned so multibyte labels ("字数") survive the tolower trip
    const int want = static_cast<unsigned char>(lower_word[i]);
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != want) {
      return false;
    }
  }
  return true;
}

size_t ci_find_last(std::string_view s, std::string_view lower_word) {
  if (lower_word.size() > s.size()) return std::string_view::npos;
  for (size_t pos = s.size() - lower_word.size() + 1; pos-- > 0;) {
    if (ci_at(s, pos, lower_word)) return pos;
  }
  return std::string_view::npos;
}

int digit_value(char32_t cp) {
  if (cp >= U'0' && cp <= U'9') return static_cast<int>(cp - U'0');
  if (cp >= 0xFF10 && cp <= 0xFF19) return static_cast<int>(cp - 0xFF10);
  return -1;
}

// Parses an integer at byte pos; ASCII or full-width digits, commas allowed
// as grouping. Returns nullopt when pos does not start with a digit.
std::optional<int64_t> parse_number(std::string_view s, size_t& pos) {
  size_t p = pos;
  size_t probe = p;
  if (probe >= s.size() || digit_value(utf8::decode(s, probe)) < 0) {
    return std::nullopt;
  }
  int64_t value = 0;
  bool any = false;
  while (p < s.size()) {
    size_t q = p;
    const char32_t cp = utf8::decode(s, q);
    const int d = digit_value(cp);
    if (d >= 0) {
      value = value * 10 + d;
      if (value > 1'000'000'000) value = 1'000'000'000;  // clamp absurd counts
      any = true;
      p = q;
      continue;
    }
    if (cp == U',' && any) {
      size_t r = q;
      if (r < s.size() && digit_value(utf8::decode(s, r)) >= 0) {
        p = q;  // grouping comma, keep going
        continue;
      }
    }
    break;
  }
  pos = p;
  return value;
}

bool is_separator_cp(char32_t cp) {
  switch (cp) {
    case U'-': case 0xFF0D: case 0x2013: case 0x2014:  // - － – —
    case U':': case 0xFF1A:                            // : ：
    case U',': case 0xFF0C:                            // , ，
    case U'.': case 0x3002:                            // . 。
    case U';': case 0xFF1B:                            // ; ；
      return true;
    default:
      return false;
  }
}

size_t skip_ws_and(std::string_view s, size_t pos, bool (*also)(char32_t)) {
  while (pos < s.size()) {
    size_t p = pos;
    const char32_t cp = utf8::decode(s, p);
    if (textmetrics::is_space(cp) || (also != nullptr && also(cp))) {
      pos = p;
    } else {
      break;
    }
  }
  return pos;
}

size_t skip_ws(std::string_view s, size_t pos) { return skip_ws_and(s, pos, nullptr); }

// Leading list/emphasis noise before the "Paragraph" keyword: markdown
// bullets, enumeration like "3.", emphasis asterisks, quote markers.
bool only_line_noise(std::string_view s) {
  size_t pos = 0;
  while (pos < s.size()) {
    const char32_t cp = utf8::decode(s, pos);
    if (textmetrics::is_space(cp)) continue;
    switch (cp) {
      case U'#': case U'*': case U'-': case U'+': case U'>': case U'`':
      case U'(': case U')': case U'.': case U'_': case 0x2022:  // •
        continue;
      default:
        if (digit_value(cp) >= 0) continue;
        return false;
    }
  }
  return true;
}

std::string strip_wrapping(std::string_view s) {
  std::string out = trim_ws(s);
  // emphasis and bracket shells around the whole field
  auto drop_pair = [&](char open, char close) {
    while (out.size() >= 2 && out.front() == open && out.back() == close) {
      out = trim_ws(std::string_view(out).substr(1, out.size() - 2));
    }
  };
  while (out.size() >= 2 && out.front() == '*' && out.back() == '*') {
    out = trim_ws(std::string_view(out).substr(1, out.size() - 2));
  }
  drop_pair('[', ']');
  return out;
}

std::string trim_field(std::string_view s) {
  // Trim whitespace plus dangling separators left over from the line grammar.
  std::string out = trim_ws(s);
  while (!out.empty()) {
    // inspect last code point
    size_t last = out.size();
    size_t start = last - 1;
    while (start > 0 && (static_cast<unsigned char>(out[start]) & 0xC0) == 0x80) {
      --start;
    }
    size_t p = start;
    const char32_t cp = utf8::decode(out, p);
    if (p == last && (is_separator_cp(cp) || textmetrics::is_space(cp))) {
      out.resize(start);
      continue;
    }
    break;
  }
  // and the mirror image at the front
  size_t pos = skip_ws_and(out, 0, is_separator_cp);
  if (pos > 0) out.erase(0, pos);
  return strip_wrapping(out);
}

struct ParsedLine {
  std::string main_point;
  int64_t target_words = 0;
};

std::optional<ParsedLine> parse_step_line(std::string_view line) {
  // Locate the keyword; everything before it must be list noise.
  size_t key = std::string_view::npos;
  for (size_t i = 0; i + 9 <= line.size(); ++i) {
    if (ci_at(line, i, "paragraph")) {
      key = i;
      break;
    }
  }
  if (key == std::string_view::npos) return std::nullopt;
  if (!only_line_noise(line.substr(0, key))) return std::nullopt;

  size_t pos = key + 9;
  pos = skip_ws(line, pos);
  if (!parse_number(line, pos)) return std::nullopt;  // step number, discarded
  pos = skip_ws_and(line, pos, is_separator_cp);

  if (!ci_at(line, pos, "main point")) return std::nullopt;
  pos += 10;
  pos = skip_ws_and(line, pos, is_separator_cp);

  // The main point runs until the word-count label; take the last occurrence
  // so the field may itself mention "word count".
  const std::string_view rest = line.substr(pos);
  size_t label = ci_find_last(rest, "word count");
  size_t label_len = 10;
  if (label == std::string_view::npos) {
    label = ci_find_last(rest, "字数");
    label_len = std::string_view("字数").size();
  }
  if (label == std::string_view::npos) return std::nullopt;

  ParsedLine parsed;
  parsed.main_point = trim_field(rest.substr(0, label));
  if (parsed.main_point.empty()) return std::nullopt;

  // First number after the label is the count; words like "approximately",
  // brackets, and unit suffixes are skipped over or ignored.
  size_t cursor = label + label_len;
  std::optional<int64_t> count;
  while (cursor < rest.size()) {
    size_t p = cursor;
    if (digit_value(utf8::decode(rest, p)) >= 0) {
      count = parse_number(rest, cursor);
      break;
    }
    cursor = p;
  }
  if (!count || *count <= 0) return std::nullopt;
  parsed.target_words = *count;
  return parsed;
}

std::string join_paragraphs(std::span<const std::string> paragraphs) {
  std::string out;
  for (size_t i = 0; i < paragraphs.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += paragraphs[i];
  }
  return out;
}

std::string render_write_prompt(const WritingInstruction& instruction,
                                const WritingPlan& plan,
                                const std::string& history,
                                const PlanStep& step) {
  std::string out;
  out.reserve(kWriteHead.size() + instruction.text.size() + plan.raw.size() +
              history.size() + step.source_line.size() + 256);
  out += kWriteHead;
  out += instruction.text;
  out += kWriteSteps;
  out += plan.raw;
  out += kWriteHistory;
  out += history;
  out += kWriteAsk;
  out += step.source_line;
  out += kWriteTail;
  return out;
}

std::string clean_paragraph(const std::string& reply) {
  return trim_ws(textmetrics::strip_section_markers(reply));
}

CallTrace make_trace(std::string label, int step_index, std::string prompt,
                     const CompletionResult& reply) {
  CallTrace t;
  t.label = std::move(label);
  t.step_index = step_index;
  t.prompt = std::move(prompt);
  t.response = reply.text;
  t.finish_reason = reply.finish_reason;
  t.latency_ms = reply.latency_ms;
  return t;
}

}  // namespace

std::string build_plan_prompt(const WritingInstruction& instruction) {
  std::string out;
  out.reserve(kPlanHead.size() + instruction.text.size() + kPlanTail.size());
  out += kPlanHead;
  out += instruction.text;
  out += kPlanTail;
  return out;
}

WritingPlan parse_plan(const std::string& raw, int max_steps,
                       const std::string& instruction_id) {
  WritingPlan plan;
  plan.instruction_id = instruction_id;
  plan.raw = raw;

  size_t pos = 0;
  while (pos <= raw.size()) {
    const size_t eol = raw.find('\n', pos);
    const size_t end = eol == std::string::npos ? raw.size() : eol;
    std::string_view line(raw.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (auto parsed = parse_step_line(line)) {
      PlanStep step;
      step.index = static_cast<int>(plan.steps.size()) + 1;
      step.main_point = std::move(parsed->main_point);
      step.target_words = parsed->target_words;
      step.out_of_range =
          step.target_words < kStepWordsMin || step.target_words > kStepWordsMax;
      step.source_line = std::string(line);
      plan.steps.push_back(std::move(step));
    }

    if (eol == std::string::npos) break;
    pos = eol + 1;
  }

  if (plan.steps.empty()) {
    throw PlanParseError(PlanParseErrorKind::no_steps,
                         "no plan steps found in planner reply (" +
                             std::to_string(raw.size()) + " bytes)");
  }
  if (static_cast<int>(plan.steps.size()) > max_steps) {
    throw PlanParseError(PlanParseErrorKind::too_many_steps,
                         "plan has " + std::to_string(plan.steps.size()) +
                             " steps, limit is " + std::to_string(max_steps));
  }
  return plan;
}

std::string build_write_prompt(const WritingInstruction& instruction,
                               const WritingPlan& plan,
                               std::span<const std::string> previous,
                               const PlanStep& step) {
  if (static_cast<int>(previous.size()) != step.index - 1) {
    throw std::invalid_argument(
        "build_write_prompt: step " + std::to_string(step.index) + " expects " +
        std::to_string(step.index - 1) + " previous paragraphs, got " +
        std::to_string(previous.size()));
  }
  const std::string history =
      previous.empty() ? std::string(kEmptyHistoryMarker) : join_paragraphs(previous);
  return render_write_prompt(instruction, plan, history, step);
}

std::string build_write_prompt_isolated(const WritingInstruction& instruction,
                                        const WritingPlan& plan,
                                        const PlanStep& step) {
  return render_write_prompt(instruction, plan, std::string(kEmptyHistoryMarker),
                             step);
}

bool AgentWriteResult::truncated() const {
  for (const auto& call : calls) {
    if (call.finish_reason == FinishReason::length) return true;
  }
  return false;
}

int64_t AgentWriteResult::total_latency_ms() const {
  int64_t total = 0;
  for (const auto& call : calls) total += call.latency_ms;
  return total;
}

namespace {
WritingPlan plan_phase(Backend& backend, const WritingInstruction& instruction,
                       const AgentWriteOptions& options, AgentWriteResult& result) {
  std::string prompt = build_plan_prompt(instruction);
  const CompletionResult reply = backend.complete(prompt);
  result.calls.push_back(make_trace("plan", 0, std::move(prompt), reply));
  return parse_plan(reply.text, options.max_steps, instruction.id);
}

// One write step: ask, clean, optionally re-ask once when the cleaned text is
// empty. Appends every backend call to `calls`.
std::string write_step(Backend& backend, const std::string& prompt, int step_index,
                       bool retry_empty, std::vector<CallTrace>& calls) {
  CompletionResult reply = backend.complete(prompt);
  calls.push_back(make_trace("write", step_index, prompt, reply));
  std::string cleaned = clean_paragraph(reply.text);
  if (cleaned.empty() && retry_empty) {
    reply = backend.complete(prompt);
    calls.push_back(make_trace("write", step_index, prompt, reply));
    cleaned = clean_paragraph(reply.text);
  }
  if (cleaned.empty()) {
    throw EmptyParagraphError(step_index, "step " + std::to_string(step_index) +
                                              " produced an empty paragraph");
  }
  return cleaned;
}

void finalize(AgentWriteResult& result, const WritingInstruction& instruction) {
  result.final_text = join_paragraphs(result.paragraphs);
  result.per_step_lengths.clear();
  result.per_step_lengths.reserve(result.paragraphs.size());
  for (const auto& p : result.paragraphs) {
    result.per_step_lengths.push_back(
        textmetrics::count_length(p, instruction.language).value);
  }
}
}  // namespace

AgentWriteResult run_sequential(Backend& backend,
                                const WritingInstruction& instruction,
                                const AgentWriteOptions& options) {
  AgentWriteResult result;
  result.mode = GenerationMode::agentwrite;
  result.plan = plan_phase(backend, instruction, options, result);

  for (const PlanStep& step : result.plan.steps) {
    const std::string prompt =
        build_write_prompt(instruction, result.plan, result.paragraphs, step);
    result.paragraphs.push_back(write_step(
        backend, prompt, step.index, options.retry_empty_paragraph, result.calls));
  }
  finalize(result, instruction);
  return result;
}

AgentWriteResult run_parallel(Backend& backend,
                              const WritingInstruction& instruction,
                              const AgentWriteOptions& options) {
  AgentWriteResult result;
  result.mode = GenerationMode::agentwrite_parallel;
  result.plan = plan_phase(backend, instruction, options, result);

  const size_t n = result.plan.steps.size();
  std::vector<std::string> paragraphs(n);
  std::vector<std::vector<CallTrace>> step_calls(n);
  std::vector<std::exception_ptr> failures(n);

  std::vector<std::thread> workers;
  workers.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    workers.emplace_back([&, i] {
      try {
        const PlanStep& step = result.plan.steps[i];
        const std::string prompt =
            build_write_prompt_isolated(instruction, result.plan, step);
        paragraphs[i] = write_step(backend, prompt, step.index,
                                   options.retry_empty_paragraph, step_calls[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();

  for (size_t i = 0; i < n; ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
  }
  for (size_t i = 0; i < n; ++i) {
    for (auto& call : step_calls[i]) result.calls.push_back(std::move(call));
    result.paragraphs.push_back(std::move(paragraphs[i]));
  }
  finalize(result, instruction);
  return result;
}

}  // namespace longwrite::agentwrite
