#include "longwrite/ruler.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "longwrite/textmetrics.hpp"
#include "longwrite/parallel.hpp"

namespace longwrite::ruler {

namespace {
struct Seed {
  Language language;
  std::string_view before;  // text before the length number
  std::string_view after;   // text after it
};

// The 8 seed prompts, English and Chinese pairs over four topics.
constexpr Seed kSeeds[kSeedCount] = {
    {Language::en, "Write a ",
     "-word novel about a teenage heroine who grows up and ends up changing "
     "the world"},
    {Language::zh, "写一部讲述一个少女英雄的成长并最终改变世界的", "字小说"},
    {Language::en, "Write a ", "-word article on the history of the Roman Empire"},
    {Language::zh, "写一篇介绍罗马帝国历史的", "字文章"},
    {Language::en, "Write a ",
     "-word paper on the impact of climate change on the global economy"},
    {Language::zh, "写一篇关于气候变化对全球经济影响的", "字论文"},
    {Language::en, "Write a ", "-word China travel guide"},
    {Language::zh, "写一篇", "字的中国旅游指南"},
};

std::string render_seed(const Seed& seed, int64_t length) {
  std::string out;
  out.reserve(seed.before.size() + seed.after.size() + 8);
  out += seed.before;
  out += std::to_string(length);
  out += seed.after;
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}
}  // namespace

std::vector<RulerCase> generate_suite(std::span<const int64_t> lengths,
                                      std::span<const int> seed_filter) {
  std::vector<int> seeds(seed_filter.begin(), seed_filter.end());
  if (seeds.empty()) {
    for (int i = 1; i <= kSeedCount; ++i) seeds.push_back(i);
  }
  for (int s : seeds) {
    if (s < 1 || s > kSeedCount) {
      throw std::out_of_range("seed index " + std::to_string(s) +
                              " outside 1.." + std::to_string(kSeedCount));
    }
  }
  for (int64_t length : lengths) {
    if (length <= 0) {
      throw std::invalid_argument("requested length must be positive, got " +
                                  std::to_string(length));
    }
  }

  std::vector<RulerCase> cases;
  cases.reserve(seeds.size() * lengths.size());
  for (int s : seeds) {
    const Seed& seed = kSeeds[s - 1];
    for (int64_t length : lengths) {
      RulerCase c;
      c.seed_index = s;
      c.language = seed.language;
      c.required_length = length;
      c.prompt = render_seed(seed, length);
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

RulerSummary run_suite(Backend& backend, std::span<const RulerCase> cases) {
  std::vector<RulerObservation> observations(cases.size());
  parallel_for(cases.size(), backend.profile().max_concurrency, [&](size_t i) {
    RulerObservation& obs = observations[i];
    obs.test_case = cases[i];
    try {
      const CompletionResult reply = backend.complete(cases[i].prompt);
      obs.response = reply.text;
      obs.measured_length =
          textmetrics::count_length(reply.text, cases[i].language).value;
      obs.latency_ms = reply.latency_ms;
      obs.truncated = reply.truncated();
      obs.refusal_suspect = obs.measured_length < kRefusalSuspectBelow;
    } catch (const std::exception& e) {
      obs.failed = true;
      obs.error = e.what();
    }
  });
  return summarize(std::move(observations));
}

RulerSummary summarize(std::vector<RulerObservation> observations) {
  RulerSummary summary;
  summary.observations = std::move(observations);
  for (const RulerObservation& obs : summary.observations) {
    if (obs.failed) {
      ++summary.failure_count;
      continue;
    }
    auto& stats = summary.per_length[obs.test_case.required_length];
    stats.sum += obs.measured_length;
    stats.count += 1;
    summary.max_output_length = std::max(summary.max_output_length, obs.measured_length);
    if (obs.truncated) ++summary.truncation_count;
    if (obs.refusal_suspect) ++summary.refusal_suspect_count;
  }
  return summary;
}

std::string summary_csv(const RulerSummary& summary) {
  std::string out = "L,mean_length";
  for (int s = 1; s <= kSeedCount; ++s) {
    out += ",seed_" + std::to_string(s);
  }
  out += "\n";

  for (const auto& [length, stats] : summary.per_length) {
    out += std::to_string(length);
    out += ",";
    out += format_double(stats.mean());
    for (int s = 1; s <= kSeedCount; ++s) {
      out += ",";
      for (const RulerObservation& obs : summary.observations) {
        if (obs.test_case.seed_index == s &&
            obs.test_case.required_length == length && !obs.failed) {
          out += std::to_string(obs.measured_length);
          break;
        }
      }
    }
    out += "\n";
  }
  return out;
}

std::vector<GenerationRecord> to_records(const RulerSummary& summary,
                                         const std::string& model_id) {
  std::vector<GenerationRecord> records;
  records.reserve(summary.observations.size());
  for (const RulerObservation& obs : summary.observations) {
    if (obs.failed) continue;
    GenerationRecord rec;
    rec.instruction_id = "ruler-s" + std::to_string(obs.test_case.seed_index) +
                         "-L" + std::to_string(obs.test_case.required_length);
    rec.model_id = model_id;
    rec.mode = GenerationMode::direct;
    rec.response = obs.response;
    rec.measured_length = obs.measured_length;
    rec.wall_time_ms = obs.latency_ms;
    rec.truncated = obs.truncated;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace longwrite::ruler
