#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance runner. Nothing here calls into the library's own UTF-8,
// framing or YXML code, so the oracles can be compared against it.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pide/document.hpp"
#include "pide/markup.hpp"

namespace testing_support {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// ---- UTF-8 ----------------------------------------------------------------

inline std::string utf8_encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

inline std::string utf8_encode(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) out += utf8_encode(c);
  return out;
}

// Decoder for text known to be valid; the lead byte alone gives the length.
inline std::u32string utf8_decode(const std::string& s) {
  std::u32string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t n = b < 0x80 ? 1 : b < 0xE0 ? 2 : b < 0xF0 ? 3 : 4;
    char32_t c = n == 1 ? b : n == 2 ? (b & 0x1F) : n == 3 ? (b & 0x0F) : (b & 0x07);
    for (std::size_t k = 1; k < n; ++k) c = (c << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out += c;
    i += n;
  }
  return out;
}

inline std::size_t utf16_units(char32_t c) { return c >= 0x10000 ? 2 : 1; }

// A code point from one of four width classes, never NUL, 0x05, 0x06 or a
// surrogate.
inline char32_t random_code_point(Rng& rng) {
  while (true) {
    char32_t c = 0;
    switch (uniform(rng, 0, 3)) {
      case 0: c = static_cast<char32_t>(uniform(rng, 0x01, 0x7F)); break;
      case 1: c = static_cast<char32_t>(uniform(rng, 0x80, 0x7FF)); break;
      case 2: c = static_cast<char32_t>(uniform(rng, 0x800, 0xFFFF)); break;
      default: c = static_cast<char32_t>(uniform(rng, 0x10000, 0x10FFFF)); break;
    }
    if (c == 0x05 || c == 0x06 || (c >= 0xD800 && c <= 0xDFFF)) continue;
    return c;
  }
}

inline std::u32string random_u32(Rng& rng, std::size_t min_len, std::size_t max_len, char32_t exclude = 0) {
  std::u32string s;
  const auto n = uniform(rng, min_len, max_len);
  while (s.size() < n) {
    const auto c = random_code_point(rng);
    if (c != exclude) s += c;
  }
  return s;
}

inline std::string random_text(Rng& rng, std::size_t min_len, std::size_t max_len, char32_t exclude = 0) {
  return utf8_encode(random_u32(rng, min_len, max_len, exclude));
}

// ---- markup ---------------------------------------------------------------

// Normalized by construction: no empty text and no two adjacent text leaves.
inline pide::markup::Body random_body(Rng& rng, std::size_t depth) {
  using pide::markup::Tree;
  pide::markup::Body body;
  const auto n = uniform(rng, 0, depth == 0 ? 3 : 4);
  for (std::size_t i = 0; i < n; ++i) {
    const bool last_is_text = !body.empty() && body.back().is_text();
    if (!last_is_text && (depth == 0 || chance(rng, 0.4))) {
      body.push_back(Tree::text(random_text(rng, 1, 8)));
      continue;
    }
    pide::markup::Attributes attrs;
    const auto n_attrs = uniform(rng, 0, 3);
    for (std::size_t a = 0; a < n_attrs; ++a) {
      auto name = random_text(rng, 1, 5, U'=');
      bool duplicate = false;
      for (const auto& [k, v] : attrs) duplicate = duplicate || k == name;
      if (!duplicate) attrs.emplace_back(std::move(name), random_text(rng, 0, 6));
    }
    auto children = depth == 0 ? pide::markup::Body{} : random_body(rng, depth - 1);
    body.push_back(Tree::elem(random_text(rng, 1, 6), std::move(attrs), std::move(children)));
  }
  return body;
}

inline std::size_t body_depth(const pide::markup::Body& body) {
  std::size_t d = 0;
  for (const auto& t : body)
    if (t.is_element()) d = std::max(d, 1 + body_depth(t.as_element().body));
  return d;
}

// ---- code-point YXML ------------------------------------------------------

// Markup tree whose fields are code-point strings.
struct UTree {
  bool is_text = false;
  std::u32string text;  // text content or element name
  std::vector<std::pair<std::u32string, std::u32string>> attributes;
  std::vector<UTree> body;

  bool operator==(const UTree&) const = default;
};

inline std::vector<UTree> decode_fields(const pide::markup::Body& body) {
  std::vector<UTree> out;
  for (const auto& t : body) {
    UTree u;
    if (t.is_text()) {
      u.is_text = true;
      u.text = utf8_decode(t.as_text().content);
    } else {
      const auto& e = t.as_element();
      u.text = utf8_decode(e.name);
      for (const auto& [k, v] : e.attributes) u.attributes.emplace_back(utf8_decode(k), utf8_decode(v));
      u.body = decode_fields(e.body);
    }
    out.push_back(std::move(u));
  }
  return out;
}

// Recursive-descent YXML parser over code points: splits the stream at X
// into chunks, then treats each chunk beginning with Y as markup.
inline std::vector<UTree> parse_u32(const std::u32string& s) {
  constexpr char32_t X = 5;
  constexpr char32_t Y = 6;
  std::vector<std::u32string> chunks{{}};
  for (char32_t c : s) {
    if (c == X)
      chunks.emplace_back();
    else
      chunks.back() += c;
  }
  // Chunks at odd indices sit between two X bytes, so they are markup.
  std::vector<std::vector<UTree>> stack{{}};
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    const auto& chunk = chunks[i];
    if (i % 2 == 0) {
      if (!chunk.empty()) {
        auto& top = stack.back();
        if (!top.empty() && top.back().is_text)
          top.back().text += chunk;
        else
          top.push_back(UTree{true, chunk, {}, {}});
      }
      continue;
    }
    if (chunk.empty() || chunk[0] != Y) throw std::runtime_error("oracle: bad markup");
    if (chunk.size() == 1) {
      if (stack.size() < 2) throw std::runtime_error("oracle: unbalanced");
      auto children = std::move(stack.back());
      stack.pop_back();
      stack.back().back().body = std::move(children);
      continue;
    }
    std::vector<std::u32string> fields{{}};
    for (std::size_t k = 1; k < chunk.size(); ++k) {
      if (chunk[k] == Y)
        fields.emplace_back();
      else
        fields.back() += chunk[k];
    }
    UTree e;
    e.text = fields[0];
    for (std::size_t k = 1; k < fields.size(); ++k) {
      const auto eq = fields[k].find(U'=');
      e.attributes.emplace_back(fields[k].substr(0, eq), fields[k].substr(eq + 1));
    }
    stack.back().push_back(std::move(e));
    stack.emplace_back();
  }
  if (stack.size() != 1) throw std::runtime_error("oracle: unclosed");
  return stack.front();
}

// ---- framing --------------------------------------------------------------

inline std::string oracle_frame(const std::string& payload) {
  return std::to_string(payload.size()) + "\n" + payload;
}

// ---- document model -------------------------------------------------------

// Node contents as plain lists, edited by direct list manipulation.
struct ListModel {
  std::map<std::string, std::vector<std::uint64_t>> nodes;
  std::map<std::uint64_t, std::string> sources;

  // Returns false for an edit the store must reject; the caller keeps a copy
  // to restore.
  bool apply(const pide::document::Edit& edit) {
    using namespace pide::document;
    auto it = nodes.find(edit.node);
    if (std::holds_alternative<DefineNode>(edit.kind)) {
      nodes.try_emplace(edit.node);
      return true;
    }
    if (it == nodes.end()) return false;
    if (std::holds_alternative<ClearNode>(edit.kind)) {
      it->second.clear();
      return true;
    }
    const auto& spans = std::get<SpanEdits>(edit.kind);
    auto& list = it->second;
    for (auto r : spans.removals) {
      bool found = false;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i] == static_cast<std::uint64_t>(r)) {
          list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    for (const auto& ins : spans.insertions) {
      std::size_t pos = 0;
      if (ins.after) {
        bool found = false;
        for (std::size_t i = 0; i < list.size(); ++i) {
          if (list[i] == static_cast<std::uint64_t>(*ins.after)) {
            pos = i + 1;
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      for (auto c : ins.commands)
        if (!sources.contains(static_cast<std::uint64_t>(c))) return false;
      for (auto c : ins.commands) list.insert(list.begin() + static_cast<std::ptrdiff_t>(pos++), static_cast<std::uint64_t>(c));
    }
    return true;
  }

  // Each command may occur once across all nodes of a version; checked on
  // the result of a whole edit list.
  bool consistent() const {
    std::map<std::uint64_t, int> seen;
    for (const auto& [name, l] : nodes)
      for (auto c : l)
        if (++seen[c] > 1) return false;
    return true;
  }

  std::string text(const std::string& node) const {
    std::string out;
    for (auto c : nodes.at(node)) out += sources.at(c);
    return out;
  }
};

}  // namespace testing_support
