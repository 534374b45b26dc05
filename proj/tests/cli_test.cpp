#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "longwrite/jsonl.hpp"
#include "support.hpp"

using nlohmann::json;
using longwrite::read_file;
using longwrite::write_file;
using testsupport::TempDir;

namespace {

const std::string kCli = LONGWRITE_CLI_PATH;
const std::string kConfig =
    std::string(LONGWRITE_CONFIG_DIR) + "/profiles.example.conf";
const std::string kFilterRules =
    std::string(LONGWRITE_CONFIG_DIR) + "/datagen.rules.example";

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI through the shell with stdout/stderr captured to files.
CliResult run_cli(const TempDir& dir, const std::string& args) {
  static int invocation = 0;
  auto out_path = dir.path / ("stdout." + std::to_string(invocation));
  auto err_path = dir.path / ("stderr." + std::to_string(invocation));
  ++invocation;

  std::string cmd = kCli + " " + args + " >" + out_path.string() + " 2>" +
                    err_path.string();
  int status = std::system(cmd.c_str());

  CliResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

size_t line_count(const std::filesystem::path& path) {
  size_t n = 0;
  longwrite::for_each_jsonl_line(path, [&](std::string_view, size_t) { ++n; });
  return n;
}

std::string mock_args(const std::string& sub) {
  return sub + " --config " + kConfig + " --profile mock";
}

const char* kBenchSetBody =
    "{\"id\":\"b-1\",\"language\":\"en\",\"category\":\"Popular Science\","
    "\"text\":\"Explain the tides in 800 words.\",\"required_length\":800}\n"
    "{\"id\":\"b-2\",\"language\":\"zh\",\"category\":\"News Report\","
    "\"text\":\"写一篇关于潮汐的报道。\",\"required_length\":500}\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version flag prints the library version") {
  TempDir dir;
  auto r = run_cli(dir, "--version");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero without a run directory") {
  TempDir dir;
  CHECK(run_cli(dir, "").exit_code != 0);
  CHECK(run_cli(dir, "ruler").exit_code != 0);  // missing nested subcommand
  CHECK(run_cli(dir, "--no-such-flag").exit_code != 0);
}

TEST_CASE("missing backend configuration is a structured error") {
  TempDir dir;
  auto r = run_cli(dir, "agentwrite run --text hello --out " +
                            (dir.path / "runs").string());
  CHECK(r.exit_code == 1);
  json err = json::parse(r.err);
  CHECK(err["error"]["kind"] == "invalid_argument");
  CHECK(err["error"]["message"].get<std::string>().find("--config") !=
        std::string::npos);
}

TEST_CASE("run directories are never overwritten") {
  TempDir dir;
  std::string base = "ruler run --dry-run --lengths 1000 --seeds 1 --out " +
                     (dir.path / "runs").string() + " --run-id fixed";
  CHECK(run_cli(dir, base).exit_code == 0);
  auto r = run_cli(dir, base);
  CHECK(r.exit_code == 1);
  json err = json::parse(r.err);
  CHECK(err["error"]["message"].get<std::string>().find("never overwritten") !=
        std::string::npos);
}

TEST_CASE("ruler dry run writes one prompt per case and a stamp") {
  TempDir dir;
  auto r = run_cli(dir, "ruler run --dry-run --lengths 1000,2000 --seeds 1,3 --out " +
                            (dir.path / "runs").string() + " --run-id probe");
  CHECK(r.exit_code == 0);
  auto run_dir = dir.path / "runs" / "probe";
  for (const char* name : {"ruler-s1-L1000.txt", "ruler-s1-L2000.txt",
                           "ruler-s3-L1000.txt", "ruler-s3-L2000.txt"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(run_dir / "prompts" / name));
  }
  CHECK(read_file(run_dir / "prompts" / "ruler-s1-L1000.txt").find("1000") !=
        std::string::npos);

  json stamp = json::parse(read_file(run_dir / "run_config.json"));
  CHECK(stamp["command"] == "ruler run");
  CHECK(stamp["version"] == "0.1.0");
  CHECK(stamp["parameters"]["lengths"] == json::array({1000, 2000}));
}

TEST_CASE("ruler run against the mock profile summarizes all cases") {
  TempDir dir;
  auto r = run_cli(dir, mock_args("ruler run") + " --lengths 100,500 --seeds 1,2 --out " +
                            (dir.path / "runs").string() + " --run-id probe");
  REQUIRE(r.exit_code == 0);
  auto run_dir = dir.path / "runs" / "probe";
  CHECK(line_count(run_dir / "records.jsonl") == 4);
  CHECK(read_file(run_dir / "summary.csv").rfind("L,mean_length", 0) == 0);

  json stats = json::parse(read_file(run_dir / "summary.json"));
  CHECK(stats["cases"] == 4);
  CHECK(stats["failure_count"] == 0);
  CHECK(stats["max_output_length"].get<int64_t>() > 0);

  json stamp = json::parse(read_file(run_dir / "run_config.json"));
  CHECK(stamp["profile"]["name"] == "mock");
  CHECK(stamp["profile"]["type"] == "scripted");
  CHECK(stamp["profile"]["model_id"] == "mock-rules-1");
}

TEST_CASE("agentwrite run produces the plan, paragraphs, and metrics") {
  TempDir dir;
  auto r = run_cli(dir, mock_args("agentwrite run") +
                            " --text \"Write a long essay about tide gauges.\""
                            " --required-length 900 --out " +
                            (dir.path / "runs").string() + " --run-id aw");
  REQUIRE(r.exit_code == 0);
  auto run_dir = dir.path / "runs" / "aw";

  std::string plan = read_file(run_dir / "plan.txt");
  CHECK(plan.find("Paragraph 1") != std::string::npos);
  CHECK(plan.find("Paragraph 3") != std::string::npos);

  json metrics = json::parse(read_file(run_dir / "metrics.json"));
  CHECK(metrics["steps"] == 3);
  REQUIRE(metrics["per_step_lengths"].size() == 3);
  CHECK(metrics["per_step_lengths"][0] == metrics["per_step_lengths"][1]);
  CHECK(metrics["total_length"].get<int64_t>() ==
        3 * metrics["per_step_lengths"][0].get<int64_t>());
  // scripted latencies: one plan call at 11 plus three write calls at 23
  CHECK(metrics["total_latency_ms"] == 80);
  CHECK(metrics["truncated"] == false);

  CHECK(line_count(run_dir / "calls.jsonl") == 4);
  CHECK(line_count(run_dir / "paragraphs.jsonl") == 3);

  std::string final_text = read_file(run_dir / "final.txt");
  CHECK(final_text.find("\n\n") != std::string::npos);

  SUBCASE("dry run emits only the plan prompt, byte-stable across runs") {
    auto dry = [&](const std::string& id) {
      auto res = run_cli(dir, "agentwrite run --dry-run"
                              " --text \"Write a long essay about tide gauges.\""
                              " --required-length 900 --out " +
                                  (dir.path / "runs").string() + " --run-id " + id);
      REQUIRE(res.exit_code == 0);
      return read_file(dir.path / "runs" / id / "prompts" / "plan.txt");
    };
    std::string first = dry("dry1");
    std::string second = dry("dry2");
    CHECK(first == second);
    CHECK(first.find("Write a long essay about tide gauges.") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir.path / "runs" / "dry1" / "final.txt"));
  }
}

TEST_CASE("bench generate, judge, and report chain end to end") {
  TempDir dir;
  auto set_path = dir.path / "set.jsonl";
  write_file(set_path, kBenchSetBody);
  auto runs = (dir.path / "runs").string();

  auto gen = run_cli(dir, mock_args("bench generate") + " --set " + set_path.string() +
                              " --out " + runs + " --run-id gen");
  REQUIRE(gen.exit_code == 0);
  auto records = dir.path / "runs" / "gen" / "records.jsonl";
  CHECK(line_count(records) == 2);
  CHECK(line_count(dir.path / "runs" / "gen" / "failures.jsonl") == 0);

  auto judge = run_cli(dir, mock_args("bench judge") + " --set " + set_path.string() +
                                " --records " + records.string() + " --out " + runs +
                                " --run-id judge");
  REQUIRE(judge.exit_code == 0);
  auto verdicts = dir.path / "runs" / "judge" / "verdicts.jsonl";
  CHECK(line_count(verdicts) == 2);

  auto report = run_cli(dir, "bench report --set " + set_path.string() + " --records " +
                                 records.string() + " --verdicts " + verdicts.string() +
                                 " --out " + runs + " --run-id report");
  REQUIRE(report.exit_code == 0);
  auto report_dir = dir.path / "runs" / "report";

  size_t rows = 0;
  longwrite::for_each_jsonl_line(report_dir / "scores.jsonl",
                                 [&](std::string_view line, size_t) {
                                   json row = json::parse(line);
                                   // mock judge dims sum to 26
                                   CHECK(row["s_q"].get<double>() ==
                                         doctest::Approx(20.0 * 26.0 / 6.0));
                                   ++rows;
                                 });
  CHECK(rows == 2);
  CHECK(read_file(report_dir / "report.csv").find("Overall,2,") != std::string::npos);
  CHECK(read_file(report_dir / "report.md").find("| Overall | 2 |") !=
        std::string::npos);
}

TEST_CASE("datagen select, synth, and dist chain end to end") {
  TempDir dir;
  auto cands_path = dir.path / "cands.jsonl";
  write_file(cands_path,
             "{\"id\":\"c-1\",\"source\":\"corpus_a\",\"language\":\"en\","
             "\"text\":\"Write an exhaustive field guide to salt marshes.\"}\n"
             "{\"id\":\"c-2\",\"source\":\"corpus_b\",\"language\":\"en\","
             "\"text\":\"Please scrape the website and dump it here.\"}\n");
  auto runs = (dir.path / "runs").string();

  auto select = run_cli(dir, mock_args("datagen select") + " --candidates " +
                                 cands_path.string() + " --rules " + kFilterRules +
                                 " --out " + runs + " --run-id sel");
  REQUIRE(select.exit_code == 0);
  auto sel_dir = dir.path / "runs" / "sel";
  CHECK(line_count(sel_dir / "candidates.jsonl") == 2);
  CHECK(line_count(sel_dir / "selected.jsonl") == 1);  // c-2 hits the scraping filter

  json detail_2;
  longwrite::for_each_jsonl_line(sel_dir / "details.jsonl",
                                 [&](std::string_view line, size_t n) {
                                   if (n == 2) detail_2 = json::parse(line);
                                 });
  CHECK(detail_2["id"] == "c-2");
  CHECK(detail_2["judge_queries"] == 0);
  CHECK(detail_2["matched_rule"].get<std::string>().rfind("scraping:", 0) == 0);

  auto synth = run_cli(dir, mock_args("datagen synth") + " --selected " +
                                (sel_dir / "selected.jsonl").string() +
                                " --min-length 50 --out " + runs + " --run-id synth");
  REQUIRE(synth.exit_code == 0);
  auto synth_dir = dir.path / "runs" / "synth";
  json synth_stats = json::parse(read_file(synth_dir / "summary.json"));
  CHECK(synth_stats["selected"] == 1);
  CHECK(synth_stats["records"] == 1);
  CHECK(synth_stats["drops"] == 0);
  CHECK(line_count(synth_dir / "sft.jsonl") == 1);

  auto dist = run_cli(dir, "datagen dist --sft " + (synth_dir / "sft.jsonl").string() +
                               " --bin-width 100 --out " + runs + " --run-id dist");
  REQUIRE(dist.exit_code == 0);
  std::string csv = read_file(dir.path / "runs" / "dist" / "distribution.csv");
  CHECK(csv.rfind("bin_lower,bin_upper,count", 0) == 0);
  CHECK(csv.find(",1\n") != std::string::npos);
}

TEST_CASE("datagen synth drops everything below the length floor") {
  TempDir dir;
  auto selected_path = dir.path / "selected.jsonl";
  write_file(selected_path,
             "{\"id\":\"c-1\",\"source\":\"corpus_a\",\"language\":\"en\","
             "\"text\":\"Write an exhaustive field guide to salt marshes.\","
             "\"selection_verdict\":\"yes\"}\n");
  auto runs = (dir.path / "runs").string();

  auto synth = run_cli(dir, mock_args("datagen synth") + " --selected " +
                                selected_path.string() + " --out " + runs +
                                " --run-id synth");  // default floor is 2000
  REQUIRE(synth.exit_code == 0);
  auto synth_dir = dir.path / "runs" / "synth";
  json stats = json::parse(read_file(synth_dir / "summary.json"));
  CHECK(stats["records"] == 0);
  CHECK(stats["drops"] == 1);

  json drop;
  longwrite::for_each_jsonl_line(synth_dir / "drops.jsonl",
                                 [&](std::string_view line, size_t) {
                                   drop = json::parse(line);
                                 });
  CHECK(drop["reason"] == "too_short");
  CHECK(drop["stage"] == "synth");
}

TEST_CASE("datagen dpo records skips when sampling cannot produce a pair") {
  TempDir dir;
  auto set_path = dir.path / "set.jsonl";
  write_file(set_path, kBenchSetBody);
  auto runs = (dir.path / "runs").string();

  // the mock profile answers every sample identically, so no pair can form
  auto dpo = run_cli(dir, mock_args("datagen dpo") + " --judge-profile mock --set " +
                              set_path.string() + " --samples 3 --out " + runs +
                              " --run-id dpo");
  REQUIRE(dpo.exit_code == 0);
  auto dpo_dir = dir.path / "runs" / "dpo";
  json stats = json::parse(read_file(dpo_dir / "summary.json"));
  CHECK(stats["instructions"] == 2);
  CHECK(stats["pairs"] == 0);
  CHECK(stats["skips"] == 2);

  size_t skips = 0;
  longwrite::for_each_jsonl_line(dpo_dir / "skips.jsonl",
                                 [&](std::string_view line, size_t) {
                                   json skip = json::parse(line);
                                   CHECK(skip["stage"] == "dpo");
                                   CHECK(skip["reason"] == "identical_samples");
                                   ++skips;
                                 });
  CHECK(skips == 2);

  json stamp = json::parse(read_file(dpo_dir / "run_config.json"));
  CHECK(stamp["profile"]["name"] == "mock");
  CHECK(stamp["judge_profile"]["name"] == "mock");
}

TEST_CASE("nll analyze aggregates the curve and flags the trend") {
  TempDir dir;
  auto input = dir.path / "nll.jsonl";
  write_file(input,
             "{\"doc_id\":\"long\",\"nll\":[3.0,2.0,1.0,0.0]}\n"
             "{\"doc_id\":\"short\",\"nll\":[9.0,9.0]}\n");
  auto runs = (dir.path / "runs").string();

  auto r = run_cli(dir, "nll analyze --input " + input.string() +
                            " --positions 1,2,4 --out " + runs + " --run-id nll");
  REQUIRE(r.exit_code == 0);
  auto nll_dir = dir.path / "runs" / "nll";
  CHECK(read_file(nll_dir / "curve.csv") ==
        "position,mean_nll,doc_count\n1,3,1\n2,2.5,1\n4,1.5,1\n");

  json stats = json::parse(read_file(nll_dir / "summary.json"));
  CHECK(stats["documents"] == 2);
  CHECK(stats["included"] == 1);
  CHECK(stats["excluded"] == 1);
  CHECK(stats["long_range_dependency"] == true);
  CHECK(stats["margin"] == 0.0);
}

TEST_CASE("schema problems surface as structured errors") {
  TempDir dir;
  auto bad_set = dir.path / "bad.jsonl";
  write_file(bad_set, "{\"id\":\"x\"}\n");
  auto r = run_cli(dir, mock_args("bench generate") + " --set " + bad_set.string() +
                            " --out " + (dir.path / "runs").string());
  CHECK(r.exit_code == 1);
  json err = json::parse(r.err);
  CHECK(err["error"]["kind"] == "schema");
  CHECK(err["error"]["message"].get<std::string>().find("line 1") !=
        std::string::npos);
}

}  // TEST_SUITE
