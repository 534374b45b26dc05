#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace longwrite::nllprobe {

// Per-token negative log-likelihood stream for one document, natural log.
// Producing these requires logit access, so they arrive via JSONL and the
// file format is the contract.
struct NllSeries {
  std::string doc_id;
  std::vector<double> nll;  // non-negative
  int64_t token_count = 0;  // always nll.size()
};

NllSeries make_series(std::string doc_id, std::vector<double> nll);

// Throws std::invalid_argument on empty series, token_count mismatch, or a
// negative entry.
void validate(const NllSeries& series);

// output[i] = mean(nll[0..i]). Prefix-consistent: truncating the input to k
// tokens reproduces the first k outputs.
std::vector<double> cumulative_average(const NllSeries& series);

// Documents shorter than max(positions) are excluded wholesale, matching the
// "only texts of at least N tokens" filter.
inline constexpr int64_t kDefaultMinTokens = 8192;

struct AggregateCurve {
  std::vector<int64_t> positions;  // 1-based token positions, caller's order
  std::vector<double> mean_nll;    // parallel to positions; 0.0 when no docs
  int included_count = 0;
  int excluded_count = 0;
};

// Mean of cumulative_average across documents at each grid position.
// positions must be non-empty with every entry >= 1.
AggregateCurve aggregate_curves(std::span<const NllSeries> series_set,
                                std::span<const int64_t> positions);

// True when the curve ends more than `margin` below where it starts, i.e.
// later positions predict better than early ones. curve needs >= 2 points.
bool long_range_dependency_flag(std::span<const double> curve, double margin = 0.0);

// JSONL of {"doc_id": ..., "nll": [...]}; optional "token_count" must match
// the array length. Negative entries, empty arrays, and duplicate ids are
// SchemaErrors carrying the line number.
std::vector<NllSeries> load_nll_jsonl(const std::filesystem::path& path);

// position,mean_nll,doc_count rows; mean cell empty when no document
// survived the length filter.
std::string curve_csv(const AggregateCurve& curve);

}  // namespace longwrite::nllprobe
