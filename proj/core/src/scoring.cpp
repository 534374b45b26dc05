#include "longwrite/scoring.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace longwrite {

double score_length(int64_t required, int64_t actual) {
  if (required <= 0) {
    throw std::invalid_argument("score_length: required must be positive, got " +
                                std::to_string(required));
  }
  if (actual < 0) {
    throw std::invalid_argument("score_length: actual must be non-negative, got " +
                                std::to_string(actual));
  }
  if (actual == 0) return 0.0;

  const double r = static_cast<double>(required);
  const double a = static_cast<double>(actual);
  double s;
  if (actual > required) {
    s = 100.0 * std::max(0.0, 1.0 - (a / r - 1.0) / 3.0);
  } else {
    s = 100.0 * std::max(0.0, 1.0 - (r / a - 1.0) / 2.0);
  }
  return s;
}

double score_quality(const DimScores& dims) {
  if (dims.size() != kQualityDimensions.size()) {
    throw std::invalid_argument("score_quality: expected " +
                                std::to_string(kQualityDimensions.size()) +
                                " dimensions, got " + std::to_string(dims.size()));
  }
  int sum = 0;
  for (std::string_view name : kQualityDimensions) {
    auto it = dims.find(std::string(name));
    if (it == dims.end()) {
      throw std::invalid_argument("score_quality: missing dimension \"" +
                                  std::string(name) + "\"");
    }
    if (it->second < 1 || it->second > 5) {
      throw std::invalid_argument("score_quality: dimension \"" + it->first +
                                  "\" out of range [1,5]: " +
                                  std::to_string(it->second));
    }
    sum += it->second;
  }
  return 20.0 * static_cast<double>(sum) / static_cast<double>(kQualityDimensions.size());
}

double combine(double s_l, double s_q) {
  if (s_l < 0.0 || s_l > 100.0 || s_q < 0.0 || s_q > 100.0) {
    throw std::invalid_argument("combine: scores must lie in [0,100]");
  }
  return (s_l + s_q) / 2.0;
}

std::string LengthBucket::label() const {
  return "[" + std::to_string(lower) + ", " + std::to_string(upper) + ")";
}

std::array<LengthBucket, kBucketCount> buckets() {
  std::array<LengthBucket, kBucketCount> out;
  for (int i = 0; i < kBucketCount; ++i) {
    out[i] = LengthBucket{kBucketBounds[i], kBucketBounds[i + 1]};
  }
  return out;
}

int bucket_of(int64_t required_length) {
  for (int i = 0; i < kBucketCount; ++i) {
    if (required_length >= kBucketBounds[i] && required_length < kBucketBounds[i + 1]) {
      return i;
    }
  }
  throw std::out_of_range("bucket_of: length " + std::to_string(required_length) +
                          " outside [0, 20000)");
}

}  // namespace longwrite
