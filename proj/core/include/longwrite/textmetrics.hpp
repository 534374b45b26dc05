#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "longwrite/types.hpp"

namespace longwrite::textmetrics {

enum class LengthUnit { words, characters };

struct LengthCount {
  int64_t value = 0;
  LengthUnit unit = LengthUnit::words;

  friend bool operator==(const LengthCount&, const LengthCount&) = default;
};

// Counts output length in the unit the instruction language implies.
//
// en (unit = words): number of maximal non-whitespace runs that contain at
// least one word-forming code point. Runs made purely of punctuation are not
// counted; numerals, URLs and code identifiers are.
//
// zh (unit = characters): number of CJK unified ideograph code points, plus
// the en-rule word count of the non-ideograph stretches between them, so
// embedded Latin words each count as one ("GPT很强" counts 3).
//
// The classification tables (whitespace, punctuation, ideograph blocks) are
// frozen in textmetrics.cpp; hand-counted golden fixtures pin them down.
LengthCount count_length(std::string_view text, Language lang);

// Character classes used by count_length, exposed for tests.
bool is_space(char32_t cp);
bool is_word_forming(char32_t cp);
bool is_cjk_ideograph(char32_t cp);

// Removes leading structural markers from each paragraph block (blocks are
// separated by blank lines). Recognized markers, matched case-insensitively
// at block start and repeatedly until none remains (this makes the function
// idempotent):
//
//   Paragraph N      Paragraph N:      Paragraph N -      Paragraph N.
//   Section N        (same punctuation variants)
//   第N段            第N段：            第N段-
//
// N may be ASCII digits, full-width digits, or Chinese numerals. Full-width
// colons and dashes are accepted everywhere. Markers in the interior of a
// block are never touched, and output is never longer than input.
std::string strip_section_markers(std::string_view text);

}  // namespace longwrite::textmetrics
