#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pide::markup {

struct Tree;

/// Mixed content: an ordered list of elements and text leaves.
using Body = std::vector<Tree>;
using Attributes = std::vector<std::pair<std::string, std::string>>;

struct Element {
  std::string name;
  Attributes attributes;
  Body body;

  bool operator==(const Element&) const = default;
};

struct Text {
  std::string content;

  bool operator==(const Text&) const = default;
};

/// Untyped markup tree: either an element or a nonempty text leaf.
struct Tree {
  std::variant<Element, Text> node;

  static Tree text(std::string content) { return Tree{Text{std::move(content)}}; }
  static Tree elem(std::string name, Attributes attributes = {}, Body body = {}) {
    return Tree{Element{std::move(name), std::move(attributes), std::move(body)}};
  }

  bool is_text() const { return std::holds_alternative<Text>(node); }
  bool is_element() const { return std::holds_alternative<Element>(node); }

  const Text& as_text() const { return std::get<Text>(node); }
  const Element& as_element() const { return std::get<Element>(node); }
  Element& as_element() { return std::get<Element>(node); }

  bool operator==(const Tree&) const = default;
};

/// Merges adjacent text leaves and drops empty ones, recursively.
Body normalize(Body body);

/// True when no two adjacent siblings are text and no text leaf is empty,
/// at every level.
bool is_normalized(const Body& body);

/// Concatenated text content, markup stripped.
std::string content_of(const Body& body);

/// Human-readable rendering for diagnostics; not a wire format.
std::string debug_string(const Body& body);

}  // namespace pide::markup
