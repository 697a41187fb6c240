#pragma once

// Conversion between byte offsets into UTF-8 text (prover side) and UTF-16
// code-unit offsets (editor side). Code points outside the Basic
// Multilingual Plane occupy four bytes and two code units.

#include <cstddef>
#include <stdexcept>
#include <string_view>

namespace pide::text {

class PositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Half-open [start, stop) in UTF-8 bytes.
struct ByteRange {
  std::size_t start = 0;
  std::size_t stop = 0;

  std::size_t length() const { return stop - start; }
  bool operator==(const ByteRange&) const = default;
};

/// Half-open [start, stop) in UTF-16 code units.
struct Utf16Range {
  std::size_t start = 0;
  std::size_t stop = 0;

  std::size_t length() const { return stop - start; }
  bool operator==(const Utf16Range&) const = default;
};

/// Number of UTF-16 code units encoding text[0, byte_offset). Throws
/// PositionError for malformed UTF-8 in the prefix, an offset past the end,
/// or an offset inside a multi-byte sequence. O(byte_offset).
std::size_t byte_offset_to_char_offset(std::string_view text, std::size_t byte_offset);

/// Byte offset of the code point boundary that lies `char_offset` UTF-16
/// code units into the text. Throws PositionError for an offset past the
/// end or one that splits a surrogate pair.
std::size_t char_offset_to_byte_offset(std::string_view text, std::size_t char_offset);

Utf16Range convert_range(std::string_view text, ByteRange range);
ByteRange convert_range(std::string_view text, Utf16Range range);

/// Total length of the text in UTF-16 code units (text must be valid UTF-8).
std::size_t utf16_length(std::string_view text);

/// Strict UTF-8 decoding of one code point at `pos`. Returns the number of
/// bytes consumed and stores the code point; 0 on malformed input (overlong
/// forms, surrogates, values above U+10FFFF, truncated sequences).
std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& code_point);

bool is_valid_utf8(std::string_view text);

}  // namespace pide::text
