#include "pide/lexer.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

namespace pide::lexer {

namespace {

// Commands, proof-structure words and term-level keywords.
constexpr std::array builtin_keywords = {
    "Theorem",   "Lemma",     "Remark",   "Fact",       "Corollary", "Proposition", "Example",
    "Proof",     "Qed",       "Defined",  "Admitted",   "Abort",     "Definition",  "Fixpoint",
    "CoFixpoint", "Inductive", "CoInductive", "Record", "Structure", "Variable",    "Hypothesis",
    "Parameter", "Axiom",     "Section",  "End",        "Module",    "Require",     "Import",
    "Export",    "Notation",  "Check",    "Print",      "Compute",   "match",       "with",
    "end",       "fun",       "forall",   "exists",     "let",       "in",          "if",
    "then",      "else",      "return",   "Type",       "Prop",      "Set",
};

// Longest first within each length class.
constexpr std::array<std::string_view, 16> operators = {
    "<->", ":=", "=>", "->", "<-", "/\\", "\\/", "::", "<>", "<=", ">=", "|-", "||", "&&", ":>", "..",
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

}  // namespace

std::string_view markup_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "coq.keyword";
    case TokenKind::ident: return "coq.ident";
    case TokenKind::number: return "coq.number";
    case TokenKind::string_lit: return "coq.string";
    case TokenKind::comment: return "coq.comment";
    case TokenKind::delimiter: return "coq.delimiter";
    case TokenKind::proof_dot: return "coq.dot";
    case TokenKind::error: return "coq.error";
    case TokenKind::whitespace: return "";
  }
  return "";
}

std::string_view kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::ident: return "ident";
    case TokenKind::number: return "number";
    case TokenKind::string_lit: return "string";
    case TokenKind::comment: return "comment";
    case TokenKind::delimiter: return "delimiter";
    case TokenKind::proof_dot: return "dot";
    case TokenKind::whitespace: return "whitespace";
    case TokenKind::error: return "error";
  }
  return "";
}

KeywordTable::KeywordTable() : words_(builtin_keywords.begin(), builtin_keywords.end()) {}

KeywordTable::KeywordTable(std::vector<std::string> words)
    : words_(std::make_move_iterator(words.begin()), std::make_move_iterator(words.end())) {}

KeywordTable KeywordTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read keyword file " + path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  return KeywordTable(std::move(words));
}

bool KeywordTable::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

const KeywordTable& default_keywords() {
  static const KeywordTable table;
  return table;
}

std::size_t Lexer::scan_comment(std::size_t pos) const {
  int depth = 0;
  const auto n = source_.size();
  while (pos < n) {
    if (source_[pos] == '(' && pos + 1 < n && source_[pos + 1] == '*') {
      ++depth;
      pos += 2;
    } else if (source_[pos] == '*' && pos + 1 < n && source_[pos + 1] == ')') {
      pos += 2;
      if (--depth == 0) return pos;
    } else {
      ++pos;
    }
  }
  return std::string_view::npos;
}

std::size_t Lexer::scan_string(std::size_t pos) const {
  const auto n = source_.size();
  for (++pos; pos < n; ++pos) {
    if (source_[pos] != '"') continue;
    if (pos + 1 < n && source_[pos + 1] == '"')
      ++pos;
    else
      return pos + 1;
  }
  return std::string_view::npos;
}

std::size_t Lexer::scan_ident(std::size_t pos) const {
  char32_t cp;
  while (pos < source_.size()) {
    const char c = source_[pos];
    if (is_ascii_letter(c) || is_digit(c) || c == '\'') {
      ++pos;
    } else if (static_cast<unsigned char>(c) >= 0x80) {
      const auto len = text::decode_utf8(source_, pos, cp);
      if (len == 0) break;
      pos += len;
    } else {
      break;
    }
  }
  return pos;
}

std::size_t Lexer::scan_number(std::size_t pos) const {
  const auto n = source_.size();
  while (pos < n && is_digit(source_[pos])) ++pos;
  if (pos + 1 < n && source_[pos] == '.' && is_digit(source_[pos + 1])) {
    pos += 1;
    while (pos < n && is_digit(source_[pos])) ++pos;
  }
  return pos;
}

std::optional<Token> Lexer::next() {
  const auto n = source_.size();
  const auto start = pos_;
  if (start >= n) return std::nullopt;

  auto emit = [&](TokenKind kind, std::size_t stop) {
    pos_ = stop;
    return Token{kind, {start, stop}};
  };

  const char c = source_[start];
  if (is_space(c)) {
    auto stop = start;
    while (stop < n && is_space(source_[stop])) ++stop;
    return emit(TokenKind::whitespace, stop);
  }
  if (c == '(' && start + 1 < n && source_[start + 1] == '*') {
    const auto stop = scan_comment(start);
    return stop == std::string_view::npos ? emit(TokenKind::error, n) : emit(TokenKind::comment, stop);
  }
  if (c == '"') {
    const auto stop = scan_string(start);
    return stop == std::string_view::npos ? emit(TokenKind::error, n) : emit(TokenKind::string_lit, stop);
  }
  if (is_digit(c)) return emit(TokenKind::number, scan_number(start));
  if (c == '.') {
    if (start + 1 == n || is_space(source_[start + 1])) return emit(TokenKind::proof_dot, start + 1);
  }
  char32_t cp;
  const bool non_ascii = static_cast<unsigned char>(c) >= 0x80;
  if (non_ascii && text::decode_utf8(source_, start, cp) == 0) return emit(TokenKind::error, start + 1);
  if (is_ascii_letter(c) || non_ascii) {
    const auto stop = scan_ident(start);
    const auto word = source_.substr(start, stop - start);
    return emit(keywords_->contains(word) ? TokenKind::keyword : TokenKind::ident, stop);
  }
  for (const auto op : operators) {
    // ".." must not swallow a terminating dot.
    if (op == ".." && start + 2 <= n && (start + 2 == n || is_space(source_[start + 2]))) continue;
    if (source_.substr(start, op.size()) == op) return emit(TokenKind::delimiter, start + op.size());
  }
  return emit(TokenKind::delimiter, start + 1);
}

std::vector<Token> tokenize(std::string_view source, const KeywordTable& keywords) {
  std::vector<Token> tokens;
  Lexer lexer(source, keywords);
  while (auto token = lexer.next()) tokens.push_back(*token);
  return tokens;
}

std::vector<std::string> split_spans(std::string_view source, const KeywordTable& keywords) {
  std::vector<std::string> spans;
  std::size_t span_start = 0;
  Lexer lexer(source, keywords);
  while (auto token = lexer.next()) {
    if (token->kind != TokenKind::proof_dot) continue;
    spans.emplace_back(source.substr(span_start, token->range.stop - span_start));
    span_start = token->range.stop;
  }
  if (span_start < source.size()) spans.emplace_back(source.substr(span_start));
  return spans;
}

std::optional<Markup> markup_of(const Token& token) {
  if (token.kind == TokenKind::whitespace) return std::nullopt;
  return Markup{token.range, markup::Tree::elem(std::string(markup_name(token.kind)))};
}

std::vector<Markup> process_span(std::string_view source, const KeywordTable& keywords) {
  std::vector<Markup> result;
  Lexer lexer(source, keywords);
  while (auto token = lexer.next())
    if (auto m = markup_of(*token)) result.push_back(std::move(*m));
  return result;
}

}  // namespace pide::lexer
