#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "longwrite/agentwrite.hpp"
#include "longwrite/backend.hpp"
#include "longwrite/bench.hpp"
#include "longwrite/datagen.hpp"
#include "longwrite/jsonl.hpp"
#include "longwrite/nllprobe.hpp"
#include "longwrite/parallel.hpp"
#include "longwrite/profile_config.hpp"
#include "longwrite/ruler.hpp"
#include "longwrite/scoring.hpp"
#include "longwrite/textmetrics.hpp"
#include "longwrite/types.hpp"
#include "run_dir.hpp"

namespace {

using namespace longwrite;
using cli::open_run_dir;
using cli::RunContext;
using nlohmann::ordered_json;

void handle_sigint(int) { request_cancellation(); }

std::string safe_name(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '-';
    out += ok ? c : '_';
  }
  return out.empty() ? std::string("x") : out;
}

struct BackendArgs {
  std::string config;
  std::string profile;
};

void add_backend_args(CLI::App* sub, BackendArgs& args) {
  sub->add_option("--config", args.config, "profiles file (key-value sections)");
  sub->add_option("--profile", args.profile, "profile name within the config");
}

std::pair<std::unique_ptr<Backend>, ProfileConfig> open_backend(const BackendArgs& args) {
  if (args.config.empty() || args.profile.empty()) {
    throw std::invalid_argument("--config and --profile are required unless --dry-run");
  }
  auto profiles = load_profiles(args.config);
  ProfileConfig config = get_profile(profiles, args.profile);
  return {make_backend(config), config};
}

// Cancellation leaves partial outputs on disk; the exit must still be loud.
void throw_if_cancelled(const RunContext& ctx) {
  if (cancellation_requested()) {
    throw BackendError(BackendErrorKind::cancelled,
                       "interrupted; partial outputs kept in " + ctx.dir.string());
  }
}

void write_failures(const RunContext& ctx, const std::string& name,
                    const std::vector<std::pair<std::string, std::string>>& failures) {
  std::string body;
  for (const auto& [id, error] : failures) {
    ordered_json entry;
    entry["id"] = id;
    entry["error"] = error;
    body += entry.dump();
    body += '\n';
  }
  ctx.write_text(name, body);
}

Language parse_language(const std::string& s) {
  auto lang = language_from_string(s);
  if (!lang) throw std::invalid_argument("unknown language: " + s);
  return *lang;
}

GenerationMode parse_mode(const std::string& s) {
  auto mode = generation_mode_from_string(s);
  if (!mode) throw std::invalid_argument("unknown mode: " + s);
  return *mode;
}

// ---------------------------------------------------------------------------
// ruler run

struct RulerArgs {
  BackendArgs backend;
  std::string out;
  std::string run_id;
  std::vector<int64_t> lengths{std::begin(ruler::kDefaultLengths),
                               std::end(ruler::kDefaultLengths)};
  std::vector<int> seeds;
  bool dry_run = false;
};

void cmd_ruler_run(const RulerArgs& args) {
  auto cases = ruler::generate_suite(args.lengths, args.seeds);

  RunContext ctx = open_run_dir(args.out, args.run_id, "ruler run");
  ctx.add_param("lengths", args.lengths);
  ctx.add_param("seeds", args.seeds);
  ctx.add_param("dry_run", args.dry_run);

  if (args.dry_run) {
    ctx.write_stamp();
    std::filesystem::create_directories(ctx.dir / "prompts");
    for (const auto& test_case : cases) {
      std::string name = "ruler-s" + std::to_string(test_case.seed_index) + "-L" +
                         std::to_string(test_case.required_length);
      ctx.write_text("prompts/" + name + ".txt", test_case.prompt);
    }
    std::cout << "wrote " << cases.size() << " prompt files to " << ctx.dir.string() << "\n";
    return;
  }

  auto [backend, config] = open_backend(args.backend);
  ctx.add_profile(config);
  ctx.write_stamp();

  ruler::RulerSummary summary = ruler::run_suite(*backend, cases);
  auto records = ruler::to_records(summary, config.profile.model_id);
  bench::save_records(ctx.dir / "records.jsonl", records);
  ctx.write_text("summary.csv", ruler::summary_csv(summary));

  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& obs : summary.observations) {
    if (obs.failed) {
      failures.emplace_back("ruler-s" + std::to_string(obs.test_case.seed_index) + "-L" +
                                std::to_string(obs.test_case.required_length),
                            obs.error);
    }
  }
  write_failures(ctx, "failures.jsonl", failures);

  ordered_json stats;
  stats["cases"] = summary.observations.size();
  stats["max_output_length"] = summary.max_output_length;
  stats["truncation_count"] = summary.truncation_count;
  stats["refusal_suspect_count"] = summary.refusal_suspect_count;
  stats["failure_count"] = summary.failure_count;
  ctx.write_text("summary.json", stats.dump(2) + "\n");

  throw_if_cancelled(ctx);
  std::cout << "ran " << summary.observations.size() << " cases, max output length "
            << summary.max_output_length << ", outputs in " << ctx.dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// agentwrite run

struct AgentWriteArgs {
  BackendArgs backend;
  std::string out;
  std::string run_id;
  std::string text;
  std::string text_file;
  std::string id = "adhoc-1";
  std::string language = "en";
  std::string mode = "sequential";
  int max_steps = agentwrite::kDefaultMaxSteps;
  int64_t required_length = 0;
  bool dry_run = false;
};

void cmd_agentwrite_run(const AgentWriteArgs& args) {
  if (args.text.empty() == args.text_file.empty()) {
    throw std::invalid_argument("pass exactly one of --text or --text-file");
  }

  WritingInstruction instruction;
  instruction.id = args.id;
  instruction.language = parse_language(args.language);
  instruction.text = args.text.empty() ? read_file(args.text_file) : args.text;
  instruction.required_length = args.required_length > 0 ? args.required_length : 1;

  RunContext ctx = open_run_dir(args.out, args.run_id, "agentwrite run");
  ctx.add_param("id", args.id);
  ctx.add_param("language", args.language);
  ctx.add_param("mode", args.mode);
  ctx.add_param("max_steps", args.max_steps);
  ctx.add_param("required_length", args.required_length);
  ctx.add_param("dry_run", args.dry_run);
  if (!args.text_file.empty()) {
    ctx.add_input("instruction", args.text_file);
  } else {
    ctx.add_param("text", args.text);
  }

  if (args.dry_run) {
    ctx.write_stamp();
    std::filesystem::create_directories(ctx.dir / "prompts");
    // Step-II prompts depend on the plan reply, so only the plan prompt can
    // be audited without a backend.
    ctx.write_text("prompts/plan.txt", agentwrite::build_plan_prompt(instruction));
    std::cout << "wrote plan prompt to " << ctx.dir.string() << "\n";
    return;
  }

  auto [backend, config] = open_backend(args.backend);
  ctx.add_profile(config);
  ctx.write_stamp();

  agentwrite::AgentWriteOptions options;
  options.max_steps = args.max_steps;
  agentwrite::AgentWriteResult result =
      args.mode == "parallel" ? agentwrite::run_parallel(*backend, instruction, options)
                              : agentwrite::run_sequential(*backend, instruction, options);

  ctx.write_text("plan.txt", result.plan.raw);
  ctx.write_text("final.txt", result.final_text);

  std::string paragraphs;
  for (size_t i = 0; i < result.paragraphs.size(); ++i) {
    const auto& step = result.plan.steps[i];
    ordered_json entry;
    entry["step"] = step.index;
    entry["main_point"] = step.main_point;
    entry["target_words"] = step.target_words;
    entry["length"] = result.per_step_lengths[i];
    entry["text"] = result.paragraphs[i];
    paragraphs += entry.dump();
    paragraphs += '\n';
  }
  ctx.write_text("paragraphs.jsonl", paragraphs);

  std::string calls;
  for (const auto& call : result.calls) {
    ordered_json entry;
    entry["label"] = call.label;
    entry["step_index"] = call.step_index;
    entry["prompt"] = call.prompt;
    entry["response"] = call.response;
    entry["finish_reason"] = to_string(call.finish_reason);
    entry["latency_ms"] = call.latency_ms;
    calls += entry.dump();
    calls += '\n';
  }
  ctx.write_text("calls.jsonl", calls);

  int64_t total = textmetrics::count_length(result.final_text, instruction.language).value;
  ordered_json metrics;
  metrics["steps"] = result.plan.steps.size();
  metrics["mode"] = to_string(result.mode);
  metrics["total_length"] = total;
  metrics["per_step_lengths"] = result.per_step_lengths;
  metrics["total_latency_ms"] = result.total_latency_ms();
  metrics["truncated"] = result.truncated();
  ctx.write_text("metrics.json", metrics.dump(2) + "\n");

  throw_if_cancelled(ctx);
  std::cout << "wrote " << result.plan.steps.size() << " paragraphs (" << total
            << " units) to " << ctx.dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// bench generate / judge / report

struct BenchGenerateArgs {
  BackendArgs backend;
  std::string out;
  std::string run_id;
  std::string set;
  bool canonical = false;
  std::string mode = "direct";
  int64_t threshold = bench::kDefaultAgentWriteThreshold;
  int max_steps = agentwrite::kDefaultMaxSteps;
  bool dry_run = false;
};

void cmd_bench_generate(const BenchGenerateArgs& args) {
  bench::BenchmarkSet set = bench::load_benchmark(args.set, args.canonical);
  GenerationMode mode = parse_mode(args.mode);

  RunContext ctx = open_run_dir(args.out, args.run_id, "bench generate");
  ctx.add_param("mode", args.mode);
  ctx.add_param("agentwrite_threshold", args.threshold);
  ctx.add_param("max_steps", args.max_steps);
  ctx.add_param("canonical", args.canonical);
  ctx.add_param("dry_run", args.dry_run);
  ctx.add_input("benchmark", args.set);

  if (args.dry_run) {
    ctx.write_stamp();
    std::filesystem::create_directories(ctx.dir / "prompts");
    for (const auto& instruction : set.instructions) {
      bool pipeline =
          mode != GenerationMode::direct && instruction.required_length >= args.threshold;
      if (pipeline) {
        ctx.write_text("prompts/" + safe_name(instruction.id) + "-plan.txt",
                       agentwrite::build_plan_prompt(instruction));
      } else {
        ctx.write_text("prompts/" + safe_name(instruction.id) + "-direct.txt",
                       instruction.text);
      }
    }
    std::cout << "wrote " << set.instructions.size() << " prompt files to "
              << ctx.dir.string() << "\n";
    return;
  }

  auto [backend, config] = open_backend(args.backend);
  ctx.add_profile(config);
  ctx.write_stamp();

  bench::GenerationOptions options;
  options.agentwrite_threshold = args.threshold;
  options.max_steps = args.max_steps;
  bench::GenerationRun run = bench::run_generation(*backend, set, mode, options);

  bench::save_records(ctx.dir / "records.jsonl", run.records);
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& failure : run.failures) {
    failures.emplace_back(failure.instruction_id, failure.error);
  }
  write_failures(ctx, "failures.jsonl", failures);

  throw_if_cancelled(ctx);
  std::cout << "generated " << run.records.size() << " of " << set.instructions.size()
            << " responses (" << run.failures.size() << " failures), outputs in "
            << ctx.dir.string() << "\n";
}

struct BenchJudgeArgs {
  BackendArgs backend;
  std::string out;
  std::string run_id;
  std::string set;
  std::string records;
  int attempts = 3;
  bool dry_run = false;
};

void cmd_bench_judge(const BenchJudgeArgs& args) {
  bench::BenchmarkSet set = bench::load_benchmark(args.set);
  std::vector<GenerationRecord> records = bench::load_records(args.records);

  std::map<std::string, const GenerationRecord*> record_by_id;
  for (const auto& record : records) record_by_id[record.instruction_id] = &record;

  struct Pair {
    const WritingInstruction* instruction;
    const GenerationRecord* record;
  };
  std::vector<Pair> pairs;
  for (const auto& instruction : set.instructions) {
    auto it = record_by_id.find(instruction.id);
    if (it != record_by_id.end()) pairs.push_back({&instruction, it->second});
  }

  RunContext ctx = open_run_dir(args.out, args.run_id, "bench judge");
  ctx.add_param("attempts", args.attempts);
  ctx.add_param("dry_run", args.dry_run);
  ctx.add_input("benchmark", args.set);
  ctx.add_input("records", args.records);

  if (args.dry_run) {
    ctx.write_stamp();
    std::filesystem::create_directories(ctx.dir / "prompts");
    for (const auto& pair : pairs) {
      ctx.write_text("prompts/" + safe_name(pair.instruction->id) + "-judge.txt",
                     bench::build_judge_prompt(*pair.instruction, pair.record->response));
    }
    std::cout << "wrote " << pairs.size() << " judge prompt files to " << ctx.dir.string()
              << "\n";
    return;
  }

  auto [backend, config] = open_backend(args.backend);
  ctx.add_profile(config);
  ctx.write_stamp();

  std::vector<std::optional<bench::JudgeVerdict>> verdicts(pairs.size());
  std::vector<std::optional<std::pair<std::string, std::string>>> failures(pairs.size());
  parallel_for(pairs.size(), config.profile.max_concurrency, [&](size_t i) {
    try {
      verdicts[i] =
          bench::judge_quality(*backend, *pairs[i].instruction, *pairs[i].record, args.attempts);
    } catch (const std::exception& e) {
      failures[i] = std::make_pair(pairs[i].instruction->id, std::string(e.what()));
    }
  });

  std::vector<bench::JudgeVerdict> ok;
  std::vector<std::pair<std::string, std::string>> failed;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (verdicts[i]) ok.push_back(std::move(*verdicts[i]));
    if (failures[i]) failed.push_back(std::move(*failures[i]));
  }
  bench::save_verdicts(ctx.dir / "verdicts.jsonl", ok);
  write_failures(ctx, "failures.jsonl", failed);

  throw_if_cancelled(ctx);
  std::cout << "judged " << ok.size() << " of " << pairs.size() << " responses ("
            << failed.size() << " failures), outputs in " << ctx.dir.string() << "\n";
}

struct BenchReportArgs {
  std::string out;
  std::string run_id;
  std::string set;
  std::string records;
  std::string verdicts;
};

void cmd_bench_report(const BenchReportArgs& args) {
  bench::BenchmarkSet set = bench::load_benchmark(args.set);
  std::vector<GenerationRecord> records = bench::load_records(args.records);
  std::vector<bench::JudgeVerdict> verdicts = bench::load_verdicts(args.verdicts);

  RunContext ctx = open_run_dir(args.out, args.run_id, "bench report");
  ctx.add_input("benchmark", args.set);
  ctx.add_input("records", args.records);
  ctx.add_input("verdicts", args.verdicts);
  ctx.write_stamp();

  bench::AggregateReport report = bench::aggregate(set, records, verdicts);
  ctx.write_text("report.md", bench::render_markdown(report));
  ctx.write_text("report.csv", bench::render_csv(report));

  std::string scores;
  for (const auto& row : bench::score_rows(set, records, verdicts)) {
    ordered_json entry;
    entry["instruction_id"] = row.instruction_id;
    entry["s_l"] = row.s_l;
    entry["s_q"] = row.s_q;
    entry["s_bar"] = row.s_bar;
    ordered_json dims;
    for (const auto& dim : kQualityDimensions) dims[std::string(dim)] = row.dims.at(std::string(dim));
    entry["dims"] = dims;
    scores += entry.dump();
    scores += '\n';
  }
  ctx.write_text("scores.jsonl", scores);

  std::cout << "scored " << report.scored_count << " instructions (excluded "
            << report.excluded_count << "), outputs in " << ctx.dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// datagen select / synth / dpo / dist

struct DatagenSelectArgs {
  BackendArgs backend;
  std::string out;
  std::string run_id;
  std::string candidates;
  std::string rules;
  std::vector<std::string> quotas;
  bool dry_run = false;
};

void cmd_datagen_select(const DatagenSelectArgs& args) {
  std::vector<datagen::CandidateInstruction> candidates =
      datagen::load_candidates(args.candidates);
  datagen::RuleFilters filters;
  if (!args.rules.empty()) filters = datagen::load_rule_filters(args.rules);

  datagen::SelectionOptions options;
  for (const auto& quota : args.quotas) {
    size_t eq = quota.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--quota expects source=count, got: " + quota);
    }
    auto source = datagen::candidate_source_from_string(quota.substr(0, eq));
    if (!source) throw std::invalid_argument("unknown source in --quota: " + quota);
    options.per_source_quota[*source] = std::stoi(quota.substr(eq + 1));
  }

  RunContext ctx = open_run_dir(args.out, args.run_id, "datagen select");
  ctx.add_param("quotas", args.quotas);
  ctx.add_param("dry_run", args.dry_run);
  ctx.add_input("candidates", args.candidates);
  if (!args.rules.empty()) ctx.add_input("rules", args.rules);

  if (args.dry_run) {
    ctx.write_stamp();
    std::filesystem::create_directories(ctx.dir / "prompts");
    for (const auto& candidate : candidates) {
      if (!filters.match(candidate.text).empty()) continue;  // judge never sees these
      ctx.write_text("prompts/" + safe_name(candidate.id) + "-select.txt",
                     datagen::build_selection_prompt(candidate.text));
    }
    std::cout << "wrote selection prompts to " << ctx.dir.string() << "\n";
    return;
  }

  auto [backend, config] = open_backend(args.backend);
  ctx.add_profile(config);
  ctx.write_stamp();

  datagen::SelectionOutcome outcome =
      datagen::select_instructions(*backend, candidates, filters, options);
  datagen::save_candidates(ctx.dir / "candidates.jsonl", outcome.candidates);
  datagen::save_candidates(ctx.dir / "selected.jsonl", outcome.selected);

  std::string details;
  for (const auto& detail : outcome.details) {
    ordered_json entry;
    entry["id"] = detail.candidate_id;
    entry["judge_queries"] = detail.judge_queries;
    entry["matched_rule"] = detail.matched_rule;
    entry["error"] = detail.error;
    details += entry.dump();
    details += '\n';
  }
  ctx.write_text("details.jsonl", details);

  throw_if_cancelled(ctx);
  std::cout << "selected " << outcome.selected.size() << " of " << candidates.size()
            << " candidates, outputs in " << ctx.dir.string() << "\n";
}

struct DatagenSynthArgs {
  BackendArgs backend;
  std::string out;
  std::string run_id;
  std::string selected;
  int64_t min_length = 2000;
  int max_steps = agentwrite::kDefaultMaxSteps;
  bool plan_augmented = false;
};

void cmd_datagen_synth(const DatagenSynthArgs& args) {
  std::vector<datagen::CandidateInstruction> all = datagen::load_candidates(args.selected);
  std::vector<datagen::CandidateInstruction> selected;
  for (const auto& candidate : all) {
    if (candidate.selection_verdict == datagen::SelectionVerdict::yes) {
      selected.push_back(candidate);
    }
  }

  RunContext ctx = open_run_dir(args.out, args.run_id, "datagen synth");
  ctx.add_param("min_output_length", args.min_length);
  ctx.add_param("max_steps", args.max_steps);
  ctx.add_param("plan_augmented", args.plan_augmented);
  ctx.add_input("selected", args.selected);

  auto [backend, config] = open_backend(args.backend);
  ctx.add_profile(config);
  ctx.write_stamp();

  datagen::SynthesisOptions options;
  options.min_output_length = args.min_length;
  options.max_steps = args.max_steps;
  datagen::SynthesisRun run = datagen::synthesize(*backend, selected, options);

  datagen::emit_sft(ctx.dir / "sft.jsonl", run.records, args.plan_augmented);
  datagen::save_drop_ledger(ctx.dir / "drops.jsonl", run.drops, {});

  ordered_json stats;
  stats["selected"] = selected.size();
  stats["records"] = run.records.size();
  stats["drops"] = run.drops.size();
  ctx.write_text("summary.json", stats.dump(2) + "\n");

  throw_if_cancelled(ctx);
  std::cout << "synthesized " << run.records.size() << " records (" << run.drops.size()
            << " drops), outputs in " << ctx.dir.string() << "\n";
}

struct DatagenDpoArgs {
  BackendArgs backend;
  std::string judge_profile;
  std::string out;
  std::string run_id;
  std::string set;
  int samples = 4;
  int attempts = 3;
  uint64_t seed = 0;
};

void cmd_datagen_dpo(const DatagenDpoArgs& args) {
  bench::BenchmarkSet set = bench::load_benchmark(args.set);

  RunContext ctx = open_run_dir(args.out, args.run_id, "datagen dpo");
  ctx.add_param("samples_per_instruction", args.samples);
  ctx.add_param("judge_max_attempts", args.attempts);
  ctx.add_param("seed", args.seed);
  ctx.add_input("instructions", args.set);

  auto [writer, writer_config] = open_backend(args.backend);
  if (args.judge_profile.empty()) {
    throw std::invalid_argument("--judge-profile is required");
  }
  auto profiles = load_profiles(args.backend.config);
  ProfileConfig judge_config = get_profile(profiles, args.judge_profile);
  auto judge = make_backend(judge_config);

  ctx.add_profile(writer_config);
  ctx.add_profile(judge_config, "judge_profile");
  ctx.write_stamp();

  datagen::DpoOptions options;
  options.samples_per_instruction = args.samples;
  options.judge_max_attempts = args.attempts;
  options.seed = args.seed;
  datagen::DpoRun run = datagen::build_dpo_pairs(*writer, *judge, set.instructions, options);

  datagen::save_dpo_pairs(ctx.dir / "pairs.jsonl", run.pairs);
  datagen::save_drop_ledger(ctx.dir / "skips.jsonl", {}, run.skips);

  ordered_json stats;
  stats["instructions"] = set.instructions.size();
  stats["pairs"] = run.pairs.size();
  stats["skips"] = run.skips.size();
  ctx.write_text("summary.json", stats.dump(2) + "\n");

  throw_if_cancelled(ctx);
  std::cout << "built " << run.pairs.size() << " preference pairs (" << run.skips.size()
            << " skips), outputs in " << ctx.dir.string() << "\n";
}

struct DatagenDistArgs {
  std::string out;
  std::string run_id;
  std::string sft;
  int64_t bin_width = 500;
};

void cmd_datagen_dist(const DatagenDistArgs& args) {
  std::vector<datagen::SftRecord> records = datagen::load_sft(args.sft);

  RunContext ctx = open_run_dir(args.out, args.run_id, "datagen dist");
  ctx.add_param("bin_width", args.bin_width);
  ctx.add_input("sft", args.sft);
  ctx.write_stamp();

  auto bins = datagen::length_distribution(records, args.bin_width);
  ctx.write_text("distribution.csv", datagen::distribution_csv(bins));

  std::cout << "binned " << records.size() << " records into " << bins.size()
            << " buckets, outputs in " << ctx.dir.string() << "\n";
}

// ---------------------------------------------------------------------------
// nll analyze

struct NllArgs {
  std::string out;
  std::string run_id;
  std::string input;
  std::vector<int64_t> positions{1, 512, 1024, 2048, 4096, 8192};
  double margin = 0.0;
};

void cmd_nll_analyze(const NllArgs& args) {
  std::vector<nllprobe::NllSeries> series = nllprobe::load_nll_jsonl(args.input);

  RunContext ctx = open_run_dir(args.out, args.run_id, "nll analyze");
  ctx.add_param("positions", args.positions);
  ctx.add_param("margin", args.margin);
  ctx.add_input("nll", args.input);
  ctx.write_stamp();

  nllprobe::AggregateCurve curve = nllprobe::aggregate_curves(series, args.positions);
  ctx.write_text("curve.csv", nllprobe::curve_csv(curve));

  bool flag = false;
  if (curve.included_count > 0 && curve.mean_nll.size() >= 2) {
    flag = nllprobe::long_range_dependency_flag(curve.mean_nll, args.margin);
  }
  ordered_json stats;
  stats["documents"] = series.size();
  stats["included"] = curve.included_count;
  stats["excluded"] = curve.excluded_count;
  stats["long_range_dependency"] = flag;
  stats["margin"] = args.margin;
  ctx.write_text("summary.json", stats.dump(2) + "\n");

  std::cout << "aggregated " << curve.included_count << " of " << series.size()
            << " documents, outputs in " << ctx.dir.string() << "\n";
}

std::string error_kind(const std::exception& e) {
  if (auto* backend = dynamic_cast<const BackendError*>(&e)) {
    return std::string(to_string(backend->kind()));
  }
  if (dynamic_cast<const SchemaError*>(&e)) return "schema";
  if (dynamic_cast<const agentwrite::PlanParseError*>(&e)) return "plan_parse";
  if (dynamic_cast<const bench::JudgeError*>(&e)) return "judge";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_sigint);

  CLI::App app{"Long-form writing pipeline toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // ruler
  auto* ruler_cmd = app.add_subcommand("ruler", "maximum-output-length probe");
  ruler_cmd->require_subcommand(1);
  RulerArgs ruler_args;
  auto* ruler_run = ruler_cmd->add_subcommand("run", "run the probe suite");
  add_backend_args(ruler_run, ruler_args.backend);
  ruler_run->add_option("--out", ruler_args.out, "parent output directory")->required();
  ruler_run->add_option("--run-id", ruler_args.run_id, "run directory name (default: UTC time)");
  ruler_run->add_option("--lengths", ruler_args.lengths, "required lengths")->delimiter(',');
  ruler_run->add_option("--seeds", ruler_args.seeds, "seed indices 1..8")->delimiter(',');
  ruler_run->add_flag("--dry-run", ruler_args.dry_run, "write prompts, send nothing");
  ruler_run->callback([&] { cmd_ruler_run(ruler_args); });

  // agentwrite
  auto* aw_cmd = app.add_subcommand("agentwrite", "plan-then-write pipeline");
  aw_cmd->require_subcommand(1);
  AgentWriteArgs aw_args;
  auto* aw_run = aw_cmd->add_subcommand("run", "run one instruction");
  add_backend_args(aw_run, aw_args.backend);
  aw_run->add_option("--out", aw_args.out)->required();
  aw_run->add_option("--run-id", aw_args.run_id);
  aw_run->add_option("--text", aw_args.text, "instruction text inline");
  aw_run->add_option("--text-file", aw_args.text_file, "instruction text from file");
  aw_run->add_option("--id", aw_args.id, "instruction id for records");
  aw_run->add_option("--language", aw_args.language)->check(CLI::IsMember({"en", "zh"}));
  aw_run->add_option("--mode", aw_args.mode)->check(CLI::IsMember({"sequential", "parallel"}));
  aw_run->add_option("--max-steps", aw_args.max_steps);
  aw_run->add_option("--required-length", aw_args.required_length,
                     "target length, recorded for scoring");
  aw_run->add_flag("--dry-run", aw_args.dry_run, "write the plan prompt, send nothing");
  aw_run->callback([&] { cmd_agentwrite_run(aw_args); });

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "writing benchmark");
  bench_cmd->require_subcommand(1);

  BenchGenerateArgs gen_args;
  auto* bench_gen = bench_cmd->add_subcommand("generate", "generate responses");
  add_backend_args(bench_gen, gen_args.backend);
  bench_gen->add_option("--out", gen_args.out)->required();
  bench_gen->add_option("--run-id", gen_args.run_id);
  bench_gen->add_option("--set", gen_args.set, "instruction JSONL")->required();
  bench_gen->add_flag("--canonical", gen_args.canonical, "enforce canonical set shape");
  bench_gen->add_option("--mode", gen_args.mode)
      ->check(CLI::IsMember({"direct", "agentwrite", "agentwrite_parallel"}));
  bench_gen->add_option("--threshold", gen_args.threshold,
                        "required length at which agentwrite modes kick in");
  bench_gen->add_option("--max-steps", gen_args.max_steps);
  bench_gen->add_flag("--dry-run", gen_args.dry_run, "write prompts, send nothing");
  bench_gen->callback([&] { cmd_bench_generate(gen_args); });

  BenchJudgeArgs judge_args;
  auto* bench_judge = bench_cmd->add_subcommand("judge", "score responses for quality");
  add_backend_args(bench_judge, judge_args.backend);
  bench_judge->add_option("--out", judge_args.out)->required();
  bench_judge->add_option("--run-id", judge_args.run_id);
  bench_judge->add_option("--set", judge_args.set, "instruction JSONL")->required();
  bench_judge->add_option("--records", judge_args.records, "generation records JSONL")->required();
  bench_judge->add_option("--attempts", judge_args.attempts, "max judge queries per response");
  bench_judge->add_flag("--dry-run", judge_args.dry_run, "write judge prompts, send nothing");
  bench_judge->callback([&] { cmd_bench_judge(judge_args); });

  BenchReportArgs report_args;
  auto* bench_report = bench_cmd->add_subcommand("report", "aggregate scores");
  bench_report->add_option("--out", report_args.out)->required();
  bench_report->add_option("--run-id", report_args.run_id);
  bench_report->add_option("--set", report_args.set, "instruction JSONL")->required();
  bench_report->add_option("--records", report_args.records)->required();
  bench_report->add_option("--verdicts", report_args.verdicts)->required();
  bench_report->callback([&] { cmd_bench_report(report_args); });

  // datagen
  auto* datagen_cmd = app.add_subcommand("datagen", "SFT/DPO data construction");
  datagen_cmd->require_subcommand(1);

  DatagenSelectArgs select_args;
  auto* dg_select = datagen_cmd->add_subcommand("select", "pick long-output instructions");
  add_backend_args(dg_select, select_args.backend);
  dg_select->add_option("--out", select_args.out)->required();
  dg_select->add_option("--run-id", select_args.run_id);
  dg_select->add_option("--candidates", select_args.candidates, "candidate JSONL")->required();
  dg_select->add_option("--rules", select_args.rules, "keyword filter file");
  dg_select->add_option("--quota", select_args.quotas, "per-source cap, source=count")
      ->allow_extra_args(false);
  dg_select->add_flag("--dry-run", select_args.dry_run, "write prompts, send nothing");
  dg_select->callback([&] { cmd_datagen_select(select_args); });

  DatagenSynthArgs synth_args;
  auto* dg_synth = datagen_cmd->add_subcommand("synth", "synthesize SFT records");
  add_backend_args(dg_synth, synth_args.backend);
  dg_synth->add_option("--out", synth_args.out)->required();
  dg_synth->add_option("--run-id", synth_args.run_id);
  dg_synth->add_option("--selected", synth_args.selected, "selected candidate JSONL")->required();
  dg_synth->add_option("--min-length", synth_args.min_length, "drop outputs shorter than this");
  dg_synth->add_option("--max-steps", synth_args.max_steps);
  dg_synth->add_flag("--plan-augmented", synth_args.plan_augmented,
                     "prepend the plan to assistant content");
  dg_synth->callback([&] { cmd_datagen_synth(synth_args); });

  DatagenDpoArgs dpo_args;
  auto* dg_dpo = datagen_cmd->add_subcommand("dpo", "build preference pairs");
  add_backend_args(dg_dpo, dpo_args.backend);
  dg_dpo->add_option("--judge-profile", dpo_args.judge_profile, "profile for the quality judge");
  dg_dpo->add_option("--out", dpo_args.out)->required();
  dg_dpo->add_option("--run-id", dpo_args.run_id);
  dg_dpo->add_option("--set", dpo_args.set, "instruction JSONL with required lengths")->required();
  dg_dpo->add_option("--samples", dpo_args.samples, "completions per instruction");
  dg_dpo->add_option("--attempts", dpo_args.attempts, "max judge queries per sample");
  dg_dpo->add_option("--seed", dpo_args.seed, "RNG seed for rejected-sample draws");
  dg_dpo->callback([&] { cmd_datagen_dpo(dpo_args); });

  DatagenDistArgs dist_args;
  auto* dg_dist = datagen_cmd->add_subcommand("dist", "output length histogram");
  dg_dist->add_option("--out", dist_args.out)->required();
  dg_dist->add_option("--run-id", dist_args.run_id);
  dg_dist->add_option("--sft", dist_args.sft, "SFT JSONL")->required();
  dg_dist->add_option("--bin-width", dist_args.bin_width);
  dg_dist->callback([&] { cmd_datagen_dist(dist_args); });

  // nll
  auto* nll_cmd = app.add_subcommand("nll", "cumulative NLL analysis");
  nll_cmd->require_subcommand(1);
  NllArgs nll_args;
  auto* nll_analyze = nll_cmd->add_subcommand("analyze", "aggregate cumulative averages");
  nll_analyze->add_option("--out", nll_args.out)->required();
  nll_analyze->add_option("--run-id", nll_args.run_id);
  nll_analyze->add_option("--input", nll_args.input, "per-token NLL JSONL")->required();
  nll_analyze->add_option("--positions", nll_args.positions, "1-based token positions")
      ->delimiter(',');
  nll_analyze->add_option("--margin", nll_args.margin, "dependency-flag margin");
  nll_analyze->callback([&] { cmd_nll_analyze(nll_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    ordered_json error;
    error["error"] = ordered_json{{"kind", error_kind(e)}, {"message", e.what()}};
    std::cerr << error.dump() << "\n";
    return 1;
  }
  return 0;
}
