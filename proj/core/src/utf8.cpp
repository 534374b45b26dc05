#include "longwrite/utf8.hpp"

namespace longwrite::utf8 {

namespace {
bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }
}  // namespace

char32_t decode(std::string_view text, size_t& pos) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
  const unsigned char b0 = bytes[pos];

  if (b0 < 0x80) {
    pos += 1;
    return b0;
  }

  int len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    pos += 1;
    return kInvalid;
  }

  if (pos + len > text.size()) {
    pos += 1;
    return kInvalid;
  }
  for (int i = 1; i < len; ++i) {
    if (!is_continuation(bytes[pos + i])) {
      pos += 1;
      return kInvalid;
    }
    cp = (cp << 6) | (bytes[pos + i] & 0x3F);
  }

  // Reject overlong encodings and surrogates.
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    pos += 1;
    return kInvalid;
  }
  pos += len;
  return cp;
}

std::vector<char32_t> decode_all(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  size_t pos = 0;
  while (pos < text.size()) out.push_back(decode(text, pos));
  return out;
}

int encoded_size(char32_t cp) {
  if (cp < 0x80) return 1;
  if (cp < 0x800) return 2;
  if (cp < 0x10000) return 3;
  return 4;
}

}  // namespace longwrite::utf8
