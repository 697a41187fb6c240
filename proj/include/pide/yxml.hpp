#pragma once

// YXML transfer syntax for markup trees.
//
// An element is written as   X Y name (Y name=value)* X  body  X Y X
// and text is written verbatim. X and Y are the two reserved control bytes
// below; they are the only wire-compatibility constants of the format. Text
// never needs quoting because neither byte may occur in names, values or
// text. Parsing works on raw bytes, so it commutes with UTF-8 decoding.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pide/markup.hpp"

namespace pide::yxml {

inline constexpr char X = '\x05';
inline constexpr char Y = '\x06';

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at byte " + std::to_string(position)),
        position_(position) {}

  /// Byte offset of the offending marker in the parsed input; for
  /// serialization errors, 0.
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Throws Error if `body` violates the tree invariants: reserved bytes or NUL
/// in names/values/text, empty element or attribute names, duplicate
/// attribute names, empty text leaves.
void check_body(const markup::Body& body);

std::string string_of_body(const markup::Body& body);
std::string string_of_tree(const markup::Tree& tree);

/// Single left-to-right pass; the result is normalized.
markup::Body parse_body(std::string_view source);

/// Exactly one tree, otherwise Error("expected single tree").
markup::Tree parse(std::string_view source);

}  // namespace pide::yxml
