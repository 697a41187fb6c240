#include "pide/yxml.hpp"

#include <algorithm>
#include <vector>

namespace pide::yxml {

using markup::Attributes;
using markup::Body;
using markup::Element;
using markup::Tree;

namespace {

bool has_reserved(std::string_view s) {
  return s.find_first_of(std::string_view("\x05\x06\0", 3)) != std::string_view::npos;
}

void check_field(std::string_view what, std::string_view s, bool nonempty) {
  if (nonempty && s.empty()) throw Error("empty " + std::string(what), 0);
  if (has_reserved(s)) throw Error("reserved byte in " + std::string(what), 0);
}

void check_attributes(const Attributes& attributes) {
  for (auto i = attributes.begin(); i != attributes.end(); ++i) {
    check_field("attribute name", i->first, true);
    check_field("attribute value", i->second, false);
    if (i->first.find('=') != std::string::npos)
      throw Error("'=' in attribute name", 0);
    if (std::any_of(attributes.begin(), i, [&](const auto& a) { return a.first == i->first; }))
      throw Error("duplicate attribute " + i->first, 0);
  }
}

void write_body(std::string& out, const Body& body);

void write_tree(std::string& out, const Tree& tree) {
  if (tree.is_text()) {
    out += tree.as_text().content;
    return;
  }
  const auto& elem = tree.as_element();
  out += X;
  out += Y;
  out += elem.name;
  for (const auto& [name, value] : elem.attributes) {
    out += Y;
    out += name;
    out += '=';
    out += value;
  }
  out += X;
  write_body(out, elem.body);
  out += X;
  out += Y;
  out += X;
}

void write_body(std::string& out, const Body& body) {
  for (const auto& tree : body) write_tree(out, tree);
}

void add_text(Body& body, std::string_view text) {
  if (!body.empty() && body.back().is_text())
    std::get<markup::Text>(body.back().node).content += text;
  else
    body.push_back(Tree::text(std::string(text)));
}

}  // namespace

void check_body(const Body& body) {
  for (const auto& tree : body) {
    if (tree.is_text()) {
      check_field("text", tree.as_text().content, true);
      continue;
    }
    const auto& elem = tree.as_element();
    check_field("element name", elem.name, true);
    check_attributes(elem.attributes);
    check_body(elem.body);
  }
}

std::string string_of_body(const Body& body) {
  check_body(body);
  std::string out;
  write_body(out, body);
  return out;
}

std::string string_of_tree(const Tree& tree) {
  return string_of_body(Body{tree});
}

Body parse_body(std::string_view source) {
  struct Frame {
    Element elem;
    std::size_t open_position;
  };
  std::vector<Frame> stack;
  Body root;
  auto current = [&]() -> Body& { return stack.empty() ? root : stack.back().elem.body; };

  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto x = source.find(X, pos);
    const auto text_end = x == std::string_view::npos ? source.size() : x;
    if (text_end > pos) {
      const auto text = source.substr(pos, text_end - pos);
      if (const auto bad = text.find_first_of(std::string_view("\x06\0", 2));
          bad != std::string_view::npos)
        throw Error("reserved byte in text", pos + bad);
      add_text(current(), text);
    }
    if (x == std::string_view::npos) break;

    const auto end = source.find(X, x + 1);
    if (end == std::string_view::npos) throw Error("unterminated markup", x);
    const auto marker = source.substr(x + 1, end - x - 1);
    if (marker.empty() || marker.front() != Y) throw Error("malformed markup", x);

    if (marker.size() == 1) {
      if (stack.empty()) throw Error("unbalanced element close", x);
      auto elem = std::move(stack.back().elem);
      stack.pop_back();
      current().push_back(Tree{std::move(elem)});
    } else {
      // Fields are separated by Y; the first is the element name.
      Element elem;
      std::size_t field_start = x + 2;
      bool first = true;
      while (true) {
        auto field_end = source.find(Y, field_start);
        if (field_end == std::string_view::npos || field_end > end) field_end = end;
        const auto field = source.substr(field_start, field_end - field_start);
        if (field.find('\0') != std::string_view::npos)
          throw Error("NUL byte in markup", field_start + field.find('\0'));
        if (first) {
          if (field.empty()) throw Error("empty element name", x);
          elem.name = std::string(field);
          first = false;
        } else {
          const auto eq = field.find('=');
          if (eq == std::string_view::npos) throw Error("attribute without '='", field_start - 1);
          if (eq == 0) throw Error("empty attribute name", field_start - 1);
          auto name = std::string(field.substr(0, eq));
          for (const auto& a : elem.attributes)
            if (a.first == name) throw Error("duplicate attribute " + name, field_start - 1);
          elem.attributes.emplace_back(std::move(name), std::string(field.substr(eq + 1)));
        }
        if (field_end == end) break;
        field_start = field_end + 1;
      }
      stack.push_back(Frame{std::move(elem), x});
    }
    pos = end + 1;
  }
  if (!stack.empty()) throw Error("unbalanced element open", stack.back().open_position);
  return root;
}

Tree parse(std::string_view source) {
  auto body = parse_body(source);
  if (body.size() != 1) throw Error("expected single tree", 0);
  return std::move(body.front());
}

}  // namespace pide::yxml
