#include "longwrite/textmetrics.hpp"

#include <cctype>

#include "longwrite/utf8.hpp"

namespace longwrite::textmetrics {

bool is_space(char32_t cp) {
  switch (cp) {
    case U'\t': case U'\n': case U'\v': case U'\f': case U'\r': case U' ':
    case 0x0085:  // next line
    case 0x00A0:  // no-break space
    case 0x1680:  // ogham space mark
    case 0x2028: case 0x2029:  // line / paragraph separator
    case 0x202F: case 0x205F:  // narrow no-break, math space
    case 0x3000:               // ideographic space
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;  // en quad .. hair space
  }
}

namespace {
// Punctuation blocks that never make a run count as a word. Anything else
// beyond ASCII is treated as word-forming, which deliberately lets ideographs,
// Cyrillic, accented letters, and stray symbols qualify.
bool is_punct_block(char32_t cp) {
  return (cp >= 0x00A1 && cp <= 0x00BF)      // Latin-1 punctuation and signs
      || (cp >= 0x2000 && cp <= 0x206F)      // general punctuation
      || (cp >= 0x2E00 && cp <= 0x2E7F)      // supplemental punctuation
      || (cp >= 0x3001 && cp <= 0x303F)      // CJK symbols and punctuation
      || (cp >= 0xFE10 && cp <= 0xFE1F)      // vertical forms
      || (cp >= 0xFE30 && cp <= 0xFE6F)      // compatibility and small forms
      || (cp >= 0xFF01 && cp <= 0xFF0F)      // full-width ！ .. ／  (digits excluded)
      || (cp >= 0xFF1A && cp <= 0xFF20)      // full-width ： .. ＠ (latin excluded)
      || (cp >= 0xFF3B && cp <= 0xFF40)      // full-width ［ .. ｀
      || (cp >= 0xFF5B && cp <= 0xFF65)      // full-width ｛ .. half-width ･
      || cp == utf8::kInvalid;
}
}  // namespace

bool is_word_forming(char32_t cp) {
  if (cp < 0x80) {
    return std::isalnum(static_cast<unsigned char>(cp)) != 0;
  }
  return !is_space(cp) && !is_punct_block(cp);
}

bool is_cjk_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF)        // unified ideographs
      || (cp >= 0x3400 && cp <= 0x4DBF)        // extension A
      || (cp >= 0x20000 && cp <= 0x2EBEF)      // extensions B..F
      || (cp >= 0x30000 && cp <= 0x3134F);     // extension G
}

LengthCount count_length(std::string_view text, Language lang) {
  const bool zh = lang == Language::zh;
  int64_t total = 0;
  bool in_run = false;
  bool has_word = false;

  auto flush = [&] {
    if (in_run && has_word) ++total;
    in_run = false;
    has_word = false;
  };

  size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::decode(text, pos);
    if (zh && is_cjk_ideograph(cp)) {
      flush();  // an ideograph bounds any pending Latin run
      ++total;
    } else if (is_space(cp)) {
      flush();
    } else {
      in_run = true;
      if (is_word_forming(cp)) has_word = true;
    }
  }
  flush();

  return LengthCount{total, zh ? LengthUnit::characters : LengthUnit::words};
}

namespace {

bool ci_prefix(std::string_view s, size_t pos, std::string_view lower_word) {
  if (pos + lower_word.size() > s.size()) return false;
  for (size_t i = 0; i < lower_word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != lower_word[i]) {
      return false;
    }
  }
  return true;
}

// Spaces and tabs only; newlines end the line-local scans below.
size_t consume_inline_space(std::string_view s, size_t pos) {
  size_t start = pos;
  while (pos < s.size()) {
    size_t p = pos;
    char32_t cp = utf8::decode(s, p);
    if (cp == U'\n' || !is_space(cp)) break;
    pos = p;
  }
  return pos - start;
}

bool is_marker_digit(char32_t cp) {
  if (cp >= U'0' && cp <= U'9') return true;
  if (cp >= 0xFF10 && cp <= 0xFF19) return true;  // full-width digits
  switch (cp) {  // Chinese numerals
    case 0x3007:                                           // 〇
    case 0x96F6: case 0x4E00: case 0x4E8C: case 0x4E09:    // 零一二三
    case 0x56DB: case 0x4E94: case 0x516D: case 0x4E03:    // 四五六七
    case 0x516B: case 0x4E5D: case 0x5341: case 0x767E:    // 八九十百
    case 0x5343: case 0x4E07: case 0x4EBF: case 0x4E24:    // 千万亿两
      return true;
    default:
      return false;
  }
}

size_t consume_number(std::string_view s, size_t pos) {
  size_t start = pos;
  while (pos < s.size()) {
    size_t p = pos;
    char32_t cp = utf8::decode(s, p);
    if (!is_marker_digit(cp)) break;
    pos = p;
  }
  return pos - start;
}

bool is_marker_punct(char32_t cp) {
  switch (cp) {
    case U':': case 0xFF1A:            // : ：
    case U'-': case 0xFF0D:            // - －
    case 0x2013: case 0x2014:          // – —
      return true;
    default:
      return false;
  }
}

bool is_dot_punct(char32_t cp) { return cp == U'.' || cp == 0x3002; }

// Length in bytes of a leading block marker in s, or 0 when s does not start
// with one. Trailing inline whitespace after the marker is included.
size_t marker_length(std::string_view s) {
  size_t pos = consume_inline_space(s, 0);
  bool zh_form = false;

  if (ci_prefix(s, pos, "paragraph")) {
    pos += 9;
  } else if (ci_prefix(s, pos, "section")) {
    pos += 7;
  } else {
    size_t p = pos;
    if (p < s.size() && utf8::decode(s, p) == 0x7B2C) {  // 第
      zh_form = true;
      pos = p;
    } else {
      return 0;
    }
  }

  size_t ws = consume_inline_space(s, pos);
  if (!zh_form && ws == 0) return 0;  // "Paragraph1" is not a marker
  pos += ws;

  size_t digits = consume_number(s, pos);
  if (digits == 0) return 0;
  pos += digits;

  if (zh_form) {
    pos += consume_inline_space(s, pos);
    size_t p = pos;
    if (p >= s.size() || utf8::decode(s, p) != 0x6BB5) return 0;  // 段
    pos = p;
  }

  size_t after_number = pos;
  pos += consume_inline_space(s, pos);

  if (pos < s.size()) {
    size_t p = pos;
    const char32_t cp = utf8::decode(s, p);
    if (is_marker_punct(cp)) {
      return p + consume_inline_space(s, p);
    }
    if (is_dot_punct(cp)) {
      // "Section 2." is a marker, "Section 2.5" is content.
      size_t q = p;
      if (q >= s.size() || is_space(utf8::decode(s, q))) {
        return p + consume_inline_space(s, p);
      }
      return 0;
    }
    if (cp == U'\n') return pos;
    // Bare form needs a whitespace boundary after the number.
    return pos > after_number ? pos : 0;
  }
  return pos;  // marker runs to end of text
}

bool is_blank_line(std::string_view line) {
  size_t pos = 0;
  while (pos < line.size()) {
    if (!is_space(utf8::decode(line, pos))) return false;
  }
  return true;
}

}  // namespace

std::string strip_section_markers(std::string_view text) {
  std::string out;
  out.reserve(text.size());

  size_t pos = 0;
  bool at_block_start = true;
  while (pos < text.size()) {
    const size_t eol = text.find('\n', pos);
    const size_t line_end = eol == std::string_view::npos ? text.size() : eol;
    const size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
    const std::string_view line = text.substr(pos, line_end - pos);

    if (is_blank_line(line)) {
      out.append(text.substr(pos, next - pos));
      at_block_start = true;
      pos = next;
      continue;
    }

    if (at_block_start) {
      size_t off = 0;
      while (true) {
        const size_t m = marker_length(line.substr(off));
        if (m == 0) break;
        off += m;
      }
      if (off >= line.size()) {
        // The whole line was markers; drop it with its terminator and keep
        // treating the next line as the block start.
        pos = next;
        continue;
      }
      out.append(line.substr(off));
      out.append(text.substr(line_end, next - line_end));
      at_block_start = false;
    } else {
      out.append(text.substr(pos, next - pos));
    }
    pos = next;
  }
  return out;
}

}  // namespace longwrite::textmetrics
