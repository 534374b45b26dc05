#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace longwrite::utf8 {

inline constexpr char32_t kInvalid = 0xFFFD;

// Decodes the code point starting at text[pos] and advances pos past it.
// Malformed sequences yield kInvalid and advance by one byte.
char32_t decode(std::string_view text, size_t& pos);

std::vector<char32_t> decode_all(std::string_view text);

// Number of bytes the encoding of cp occupies, 1..4.
int encoded_size(char32_t cp);

}  // namespace longwrite::utf8
