#include <doctest.h>

#include <stdexcept>

#include "longwrite/scoring.hpp"

using namespace longwrite;

TEST_SUITE("scoring") {

TEST_CASE("length score is 100 at exact match") {
  for (int64_t r : {1, 100, 500, 2000, 19999}) {
    CHECK(score_length(r, r) == doctest::Approx(100.0));
  }
}

TEST_CASE("length score overshoot branch") {
  // 100 * (1 - (a/r - 1) / 3), floored at zero from a = 4r.
  CHECK(score_length(1000, 2000) == doctest::Approx(100.0 * (1.0 - 1.0 / 3.0)));
  CHECK(score_length(1000, 4000) == doctest::Approx(0.0));
  CHECK(score_length(1000, 40000) == doctest::Approx(0.0));
  CHECK(score_length(300, 450) == doctest::Approx(100.0 * (1.0 - 0.5 / 3.0)));
}

TEST_CASE("length score undershoot branch") {
  // 100 * (1 - (r/a - 1) / 2), floored at zero from a = r/3.
  CHECK(score_length(1000, 500) == doctest::Approx(50.0));
  CHECK(score_length(1000, 333) == doctest::Approx(0.0).epsilon(0.01));
  CHECK(score_length(1000, 100) == doctest::Approx(0.0));
  CHECK(score_length(900, 600) == doctest::Approx(75.0));
}

TEST_CASE("zero actual scores zero") {
  CHECK(score_length(500, 0) == 0.0);
}

TEST_CASE("undershoot penalized harder than overshoot") {
  for (int64_t r : {400, 1000, 3000}) {
    const double over = score_length(r, 2 * r);
    const double under = score_length(r, r / 2);
    CHECK(under < over);
  }
}

TEST_CASE("length score rejects bad domains") {
  CHECK_THROWS_AS(score_length(0, 10), std::invalid_argument);
  CHECK_THROWS_AS(score_length(-5, 10), std::invalid_argument);
  CHECK_THROWS_AS(score_length(100, -1), std::invalid_argument);
}

TEST_CASE("quality score is twenty times the dimension mean") {
  DimScores dims;
  for (auto name : kQualityDimensions) dims[std::string(name)] = 5;
  CHECK(score_quality(dims) == doctest::Approx(100.0));
  for (auto name : kQualityDimensions) dims[std::string(name)] = 1;
  CHECK(score_quality(dims) == doctest::Approx(20.0));
  dims[std::string(kQualityDimensions[0])] = 4;
  CHECK(score_quality(dims) == doctest::Approx(20.0 * (4 + 5 * 1) / 6.0));
}

TEST_CASE("quality score validates the dimension set") {
  DimScores dims;
  for (auto name : kQualityDimensions) dims[std::string(name)] = 3;

  DimScores missing = dims;
  missing.erase(std::string(kQualityDimensions[2]));
  CHECK_THROWS_AS(score_quality(missing), std::invalid_argument);

  DimScores extra = dims;
  extra["Style"] = 3;
  CHECK_THROWS_AS(score_quality(extra), std::invalid_argument);

  DimScores out_of_range = dims;
  out_of_range[std::string(kQualityDimensions[0])] = 6;
  CHECK_THROWS_AS(score_quality(out_of_range), std::invalid_argument);
  out_of_range[std::string(kQualityDimensions[0])] = 0;
  CHECK_THROWS_AS(score_quality(out_of_range), std::invalid_argument);
}

TEST_CASE("combine is the plain mean") {
  CHECK(combine(0.0, 100.0) == doctest::Approx(50.0));
  CHECK(combine(65.3, 91.8) == doctest::Approx(78.55));
  CHECK_THROWS_AS(combine(-0.1, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(combine(50.0, 100.1), std::invalid_argument);
}

TEST_CASE("buckets partition the required-length domain") {
  auto bs = buckets();
  REQUIRE(bs.size() == 4);
  CHECK(bs[0].lower == 0);
  CHECK(bs[3].upper == 20000);
  for (int i = 1; i < kBucketCount; ++i) CHECK(bs[i].lower == bs[i - 1].upper);

  CHECK(bucket_of(0) == 0);
  CHECK(bucket_of(499) == 0);
  CHECK(bucket_of(500) == 1);
  CHECK(bucket_of(1999) == 1);
  CHECK(bucket_of(2000) == 2);
  CHECK(bucket_of(3999) == 2);
  CHECK(bucket_of(4000) == 3);
  CHECK(bucket_of(19999) == 3);
  CHECK_THROWS_AS(bucket_of(20000), std::out_of_range);
  CHECK_THROWS_AS(bucket_of(-1), std::out_of_range);
}

TEST_CASE("bucket labels") {
  auto bs = buckets();
  CHECK(bs[0].label() == "[0, 500)");
  CHECK(bs[1].label() == "[500, 2000)");
  CHECK(bs[2].label() == "[2000, 4000)");
  CHECK(bs[3].label() == "[4000, 20000)");
}

}  // TEST_SUITE
