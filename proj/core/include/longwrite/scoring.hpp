#pragma once

#include <cstdint>
#include <vector>

#include "longwrite/types.hpp"

namespace longwrite {

// Length score S_l on [0, 100].
//
// With r = required and a = actual (same unit):
//   a >  r:  100 * max(0, 1 - (a/r - 1) / 3)   zero at a >= 4r
//   a <= r:  100 * max(0, 1 - (r/a - 1) / 2)   zero at a <= r/3
//   a == 0:  0 (continuous extension of the short branch)
//
// The short branch decays faster: undershooting by a given factor scores
// lower than overshooting by the same factor.
// Throws std::invalid_argument when required <= 0 or actual < 0.
double score_length(int64_t required, int64_t actual);

// Quality score S_q = 20 * mean of the six judge dimensions.
// dims must contain exactly the six names in kQualityDimensions, each in
// [1, 5]; throws std::invalid_argument otherwise.
double score_quality(const DimScores& dims);

// Combined score: plain mean of S_l and S_q. Inputs must be in [0, 100].
double combine(double s_l, double s_q);

// Benchmark length buckets, lower-inclusive / upper-exclusive.
struct LengthBucket {
  int64_t lower = 0;
  int64_t upper = 0;  // exclusive

  bool contains(int64_t n) const { return n >= lower && n < upper; }
  std::string label() const;
};

inline constexpr int64_t kBucketBounds[] = {0, 500, 2000, 4000, 20000};
inline constexpr int kBucketCount = 4;

std::array<LengthBucket, kBucketCount> buckets();

// Index of the bucket containing required_length. The buckets partition
// [0, 20000); anything outside is a hard error (std::out_of_range).
int bucket_of(int64_t required_length);

}  // namespace longwrite
