#include "pide/text_position.hpp"

#include <string>

namespace pide::text {

namespace {

bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

[[noreturn]] void fail(const std::string& what, std::size_t offset) {
  throw PositionError(what + " at offset " + std::to_string(offset));
}

}  // namespace

std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& code_point) {
  const auto n = text.size();
  if (pos >= n) return 0;
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) {
    code_point = b0;
    return 1;
  }
  std::size_t len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return 0;
  }
  if (pos + len > n) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if (!is_continuation(b)) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  code_point = cp;
  return len;
}

bool is_valid_utf8(std::string_view text) {
  char32_t cp;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto len = decode_utf8(text, pos, cp);
    if (len == 0) return false;
    pos += len;
  }
  return true;
}

std::size_t byte_offset_to_char_offset(std::string_view text, std::size_t byte_offset) {
  if (byte_offset > text.size()) fail("byte offset past end", byte_offset);
  if (byte_offset < text.size() && is_continuation(static_cast<unsigned char>(text[byte_offset])))
    fail("byte offset inside multi-byte sequence", byte_offset);
  std::size_t units = 0;
  char32_t cp;
  for (std::size_t pos = 0; pos < byte_offset;) {
    const auto len = decode_utf8(text, pos, cp);
    if (len == 0) fail("malformed UTF-8", pos);
    if (pos + len > byte_offset) fail("byte offset inside multi-byte sequence", byte_offset);
    units += cp >= 0x10000 ? 2 : 1;
    pos += len;
  }
  return units;
}

std::size_t char_offset_to_byte_offset(std::string_view text, std::size_t char_offset) {
  std::size_t units = 0;
  std::size_t pos = 0;
  char32_t cp;
  while (units < char_offset) {
    if (pos >= text.size()) fail("character offset past end", char_offset);
    const auto len = decode_utf8(text, pos, cp);
    if (len == 0) fail("malformed UTF-8", pos);
    units += cp >= 0x10000 ? 2 : 1;
    pos += len;
  }
  if (units != char_offset) fail("character offset splits a surrogate pair", char_offset);
  return pos;
}

Utf16Range convert_range(std::string_view text, ByteRange range) {
  if (range.start > range.stop) fail("inverted range", range.start);
  return {byte_offset_to_char_offset(text, range.start), byte_offset_to_char_offset(text, range.stop)};
}

ByteRange convert_range(std::string_view text, Utf16Range range) {
  if (range.start > range.stop) fail("inverted range", range.start);
  return {char_offset_to_byte_offset(text, range.start), char_offset_to_byte_offset(text, range.stop)};
}

std::size_t utf16_length(std::string_view text) {
  return byte_offset_to_char_offset(text, text.size());
}

}  // namespace pide::text
