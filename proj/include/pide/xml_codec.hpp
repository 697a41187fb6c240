#pragma once

// Typed encoders and decoders between structured values and markup bodies.
//
// Base values are unwrapped: a string is its text (the empty string is the
// empty body), an integer its minimal decimal text, a boolean "0" or "1".
// Composite values wrap every constituent in an element named ":" without
// attributes. A variant is a single ":" element whose only attribute "tag"
// holds the decimal case index and whose body is the case payload.
//
// Decoders are strict: any extra, missing or unexpected node is an error.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pide/markup.hpp"

namespace pide::xml {

using markup::Body;
using markup::Tree;

inline constexpr const char* wrapper_name = ":";
inline constexpr const char* tag_attribute = "tag";

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
using Encoder = std::function<Body(const T&)>;

template <class T>
using Decoder = std::function<T(const Body&)>;

namespace detail {

inline Tree wrap(Body body) { return Tree::elem(wrapper_name, {}, std::move(body)); }

inline Tree wrap_tagged(std::size_t tag, Body body) {
  return Tree::elem(wrapper_name, {{tag_attribute, std::to_string(tag)}}, std::move(body));
}

inline const Body& unwrap(const Tree& tree) {
  if (!tree.is_element()) throw DecodeError("expected wrapper element, got text");
  const auto& elem = tree.as_element();
  if (elem.name != wrapper_name || !elem.attributes.empty())
    throw DecodeError("expected wrapper element, got <" + elem.name + ">");
  return elem.body;
}

inline bool is_minimal_decimal(std::string_view s) {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return s.size() == 1 || s.front() != '0';
}

inline std::int64_t parse_int(std::string_view s) {
  if (!is_minimal_decimal(s) || s == "-0") throw DecodeError("malformed integer: " + std::string(s));
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DecodeError("integer out of range: " + std::string(s));
  return value;
}

}  // namespace detail

namespace encode {

inline Body string(const std::string& s) {
  if (s.empty()) return {};
  return {Tree::text(s)};
}

inline Body integer(const std::int64_t& i) { return string(std::to_string(i)); }

inline Body boolean(const bool& b) { return string(b ? "1" : "0"); }

inline Body unit(const std::monostate&) { return {}; }

/// Identity embedding of a single raw tree.
inline Body tree(const Tree& t) { return {t}; }

template <class A, class B>
Encoder<std::pair<A, B>> pair(Encoder<A> a, Encoder<B> b) {
  return [a = std::move(a), b = std::move(b)](const std::pair<A, B>& p) {
    return Body{detail::wrap(a(p.first)), detail::wrap(b(p.second))};
  };
}

template <class A>
Encoder<std::vector<A>> list(Encoder<A> a) {
  return [a = std::move(a)](const std::vector<A>& xs) {
    Body body;
    body.reserve(xs.size());
    for (const auto& x : xs) body.push_back(detail::wrap(a(x)));
    return body;
  };
}

template <class A>
Encoder<std::optional<A>> option(Encoder<A> a) {
  return [a = std::move(a)](const std::optional<A>& x) {
    if (!x) return Body{};
    return Body{detail::wrap(a(*x))};
  };
}

/// A variant case yields its payload when the value belongs to it.
template <class V>
using Case = std::function<std::optional<Body>(const V&)>;

/// The first matching case determines the tag.
template <class V>
Encoder<V> variant(std::vector<Case<V>> cases) {
  return [cases = std::move(cases)](const V& v) {
    for (std::size_t tag = 0; tag < cases.size(); ++tag)
      if (auto payload = cases[tag](v)) return Body{detail::wrap_tagged(tag, std::move(*payload))};
    throw std::invalid_argument("variant: value matches no case");
  };
}

/// std::variant with one encoder per alternative; the tag is the index.
/// Alternative types must be pairwise distinct.
template <class... Ts>
Encoder<std::variant<Ts...>> alternatives(Encoder<Ts>... encoders) {
  using V = std::variant<Ts...>;
  std::vector<Case<V>> cases{Case<V>([e = std::move(encoders)](const V& v) -> std::optional<Body> {
    if (const auto* x = std::get_if<Ts>(&v)) return e(*x);
    return std::nullopt;
  })...};
  return variant<V>(std::move(cases));
}

}  // namespace encode

namespace decode {

inline std::string string(const Body& body) {
  if (body.empty()) return {};
  if (body.size() == 1 && body.front().is_text()) return body.front().as_text().content;
  throw DecodeError("expected text body");
}

inline std::int64_t integer(const Body& body) { return detail::parse_int(string(body)); }

inline bool boolean(const Body& body) {
  const auto s = string(body);
  if (s == "0") return false;
  if (s == "1") return true;
  throw DecodeError("malformed boolean: " + s);
}

inline std::monostate unit(const Body& body) {
  if (!body.empty()) throw DecodeError("expected empty body");
  return {};
}

inline Tree tree(const Body& body) {
  if (body.size() != 1) throw DecodeError("expected single tree, got " + std::to_string(body.size()));
  return body.front();
}

template <class A, class B>
Decoder<std::pair<A, B>> pair(Decoder<A> a, Decoder<B> b) {
  return [a = std::move(a), b = std::move(b)](const Body& body) {
    if (body.size() != 2) throw DecodeError("pair: expected 2 nodes, got " + std::to_string(body.size()));
    auto first = a(detail::unwrap(body[0]));
    auto second = b(detail::unwrap(body[1]));
    return std::pair<A, B>(std::move(first), std::move(second));
  };
}

template <class A>
Decoder<std::vector<A>> list(Decoder<A> a) {
  return [a = std::move(a)](const Body& body) {
    std::vector<A> xs;
    xs.reserve(body.size());
    for (const auto& tree : body) xs.push_back(a(detail::unwrap(tree)));
    return xs;
  };
}

template <class A>
Decoder<std::optional<A>> option(Decoder<A> a) {
  return [a = std::move(a)](const Body& body) -> std::optional<A> {
    if (body.empty()) return std::nullopt;
    if (body.size() != 1) throw DecodeError("option: expected at most 1 node");
    return a(detail::unwrap(body.front()));
  };
}

/// Splits a tagged wrapper into (tag, payload).
inline std::pair<std::size_t, const Body*> tagged(const Body& body) {
  if (body.size() != 1) throw DecodeError("variant: expected 1 node, got " + std::to_string(body.size()));
  const auto& tree = body.front();
  if (!tree.is_element()) throw DecodeError("variant: expected wrapper element, got text");
  const auto& elem = tree.as_element();
  if (elem.name != wrapper_name || elem.attributes.size() != 1 ||
      elem.attributes.front().first != tag_attribute)
    throw DecodeError("variant: malformed wrapper");
  const auto& tag_text = elem.attributes.front().second;
  const auto tag = detail::parse_int(tag_text);
  if (tag < 0) throw DecodeError("variant: negative tag " + tag_text);
  return {static_cast<std::size_t>(tag), &elem.body};
}

template <class V>
Decoder<V> variant(std::vector<Decoder<V>> cases) {
  return [cases = std::move(cases)](const Body& body) {
    auto [tag, payload] = tagged(body);
    if (tag >= cases.size()) throw DecodeError("variant: unknown tag " + std::to_string(tag));
    return cases[tag](*payload);
  };
}

template <class... Ts>
Decoder<std::variant<Ts...>> alternatives(Decoder<Ts>... decoders) {
  std::vector<Decoder<std::variant<Ts...>>> cases{
      Decoder<std::variant<Ts...>>([d = std::move(decoders)](const Body& b) {
        return std::variant<Ts...>(std::in_place_type<Ts>, d(b));
      })...};
  return variant<std::variant<Ts...>>(std::move(cases));
}

}  // namespace decode

/// Paired encoder and decoder for one type.
template <class T>
struct Codec {
  Encoder<T> encode;
  Decoder<T> decode;
};

}  // namespace pide::xml
