#include "pide/markup.hpp"

namespace pide::markup {

Body normalize(Body body) {
  Body result;
  result.reserve(body.size());
  for (auto& tree : body) {
    if (tree.is_text()) {
      auto& content = std::get<Text>(tree.node).content;
      if (content.empty()) continue;
      if (!result.empty() && result.back().is_text()) {
        std::get<Text>(result.back().node).content += content;
        continue;
      }
    } else {
      auto& elem = tree.as_element();
      elem.body = normalize(std::move(elem.body));
    }
    result.push_back(std::move(tree));
  }
  return result;
}

bool is_normalized(const Body& body) {
  bool previous_text = false;
  for (const auto& tree : body) {
    if (tree.is_text()) {
      if (previous_text || tree.as_text().content.empty()) return false;
      previous_text = true;
    } else {
      if (!is_normalized(tree.as_element().body)) return false;
      previous_text = false;
    }
  }
  return true;
}

std::string content_of(const Body& body) {
  std::string out;
  for (const auto& tree : body) {
    if (tree.is_text())
      out += tree.as_text().content;
    else
      out += content_of(tree.as_element().body);
  }
  return out;
}

std::string debug_string(const Body& body) {
  std::string out;
  for (const auto& tree : body) {
    if (tree.is_text()) {
      out += '"';
      out += tree.as_text().content;
      out += '"';
      continue;
    }
    const auto& elem = tree.as_element();
    out += '<';
    out += elem.name;
    for (const auto& [name, value] : elem.attributes) {
      out += ' ';
      out += name;
      out += "=\"";
      out += value;
      out += '"';
    }
    out += '>';
    out += debug_string(elem.body);
    out += "</>";
  }
  return out;
}

}  // namespace pide::markup
