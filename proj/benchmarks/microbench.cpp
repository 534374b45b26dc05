// Microbenchmarks for the hot paths: scoring arithmetic, length counting,
// plan parsing, and cumulative averaging. Run via ./microbench; pass
// --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "longwrite/agentwrite.hpp"
#include "longwrite/nllprobe.hpp"
#include "longwrite/scoring.hpp"
#include "longwrite/textmetrics.hpp"
#include "longwrite/types.hpp"

namespace {

using namespace longwrite;

void BM_score_length_grid(benchmark::State& state) {
  constexpr int64_t kRequired[] = {100, 500, 1000, 2000, 3000, 8000};
  for (auto _ : state) {
    double acc = 0.0;
    for (const int64_t r : kRequired) {
      for (int i = 1; i <= 60; ++i) acc += score_length(r, r * i / 10);
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 6 * 60);
}
BENCHMARK(BM_score_length_grid);

std::string english_sample(int words) {
  static const char* kWords[] = {"tide",  "gauge",   "records", "the",
                                 "slow",  "rise",    "of",      "coastal",
                                 "water", "against", "a",       "fixed-datum"};
  std::string out;
  for (int i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += kWords[i % 12];
  }
  return out;
}

std::string chinese_sample(int chars) {
  std::string out;
  for (int i = 0; i < chars; ++i) out += "\xE6\xBD\xAE";  // 潮
  return out;
}

void BM_count_length_en(benchmark::State& state) {
  const std::string text = english_sample(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto count = textmetrics::count_length(text, Language::en);
    benchmark::DoNotOptimize(count.value);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_count_length_en)->Arg(200)->Arg(2000)->Arg(20000);

void BM_count_length_zh(benchmark::State& state) {
  const std::string text = chinese_sample(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto count = textmetrics::count_length(text, Language::zh);
    benchmark::DoNotOptimize(count.value);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_count_length_zh)->Arg(200)->Arg(2000)->Arg(20000);

void BM_strip_section_markers(benchmark::State& state) {
  std::string text;
  for (int i = 1; i <= 20; ++i) {
    text += "Paragraph " + std::to_string(i) + ": " + english_sample(120) + "\n\n";
  }
  for (auto _ : state) {
    auto stripped = textmetrics::strip_section_markers(text);
    benchmark::DoNotOptimize(stripped.size());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_strip_section_markers);

void BM_parse_plan(benchmark::State& state) {
  std::string plan;
  for (int i = 1; i <= static_cast<int>(state.range(0)); ++i) {
    plan += "Paragraph " + std::to_string(i) +
            " - Main Point: development of thread " + std::to_string(i) +
            " - Word Count: " + std::to_string(200 + 40 * (i % 20)) + " words\n";
  }
  for (auto _ : state) {
    auto parsed = agentwrite::parse_plan(plan, 50);
    benchmark::DoNotOptimize(parsed.steps.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_parse_plan)->Arg(3)->Arg(12)->Arg(40);

void BM_cumulative_average(benchmark::State& state) {
  std::vector<double> nll;
  nll.reserve(static_cast<size_t>(state.range(0)));
  for (int64_t i = 0; i < state.range(0); ++i) {
    nll.push_back(2.0 + 1.0 / static_cast<double>(i + 1));
  }
  const auto series = nllprobe::make_series("bench", nll);
  for (auto _ : state) {
    auto curve = nllprobe::cumulative_average(series);
    benchmark::DoNotOptimize(curve.back());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_cumulative_average)->Arg(1024)->Arg(8192)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
