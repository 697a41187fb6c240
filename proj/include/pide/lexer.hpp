#pragma once

// Lexical analysis of Coq-like proof scripts, command-span splitting, and
// the translation of tokens into markup.
//
// Grammar, applied with maximal munch:
//   whitespace  runs of space, tab, CR, LF, FF, VT
//   comment     "(*" ... "*)", nesting
//   string      '"' ... '"', a doubled quote stands for one quote
//   identifier  letter (letter | digit | '_' | '\'')*; letters are ASCII
//               letters, '_' and every non-ASCII code point
//   keyword     an identifier listed in the keyword table
//   number      digit+ ('.' digit+)?
//   proof dot   '.' followed by whitespace or end of input
//   delimiter   any other symbol; a few two- and three-character operators
//               are kept together (":=", "->", "<->", ...)
// An unterminated comment or string is a single error token reaching to the
// end of input; a malformed UTF-8 byte is a one-byte error token.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pide/markup.hpp"
#include "pide/text_position.hpp"

namespace pide::lexer {

enum class TokenKind {
  keyword,
  ident,
  number,
  string_lit,
  comment,
  delimiter,
  proof_dot,
  whitespace,
  error,
};

struct Token {
  TokenKind kind;
  text::ByteRange range;

  bool operator==(const Token&) const = default;
};

/// Markup element name for a token kind; empty for whitespace.
std::string_view markup_name(TokenKind kind);

std::string_view kind_name(TokenKind kind);

class KeywordTable {
 public:
  /// The built-in vocabulary.
  KeywordTable();
  explicit KeywordTable(std::vector<std::string> words);

  /// One keyword per line; surrounding whitespace is trimmed, blank lines
  /// and lines starting with '#' are skipped. Throws std::runtime_error if
  /// the file cannot be read.
  static KeywordTable load(const std::string& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

const KeywordTable& default_keywords();

/// Incremental tokenizer; yields one token per call.
class Lexer {
 public:
  explicit Lexer(std::string_view source, const KeywordTable& keywords = default_keywords())
      : source_(source), keywords_(&keywords) {}

  std::optional<Token> next();

 private:
  std::size_t scan_comment(std::size_t pos) const;
  std::size_t scan_string(std::size_t pos) const;
  std::size_t scan_ident(std::size_t pos) const;
  std::size_t scan_number(std::size_t pos) const;

  std::string_view source_;
  const KeywordTable* keywords_;
  std::size_t pos_ = 0;
};

/// Exact partition of the source into tokens.
std::vector<Token> tokenize(std::string_view source, const KeywordTable& keywords = default_keywords());

/// Splits after every proof dot; trailing text forms a final span. The
/// concatenation of the result equals the source.
std::vector<std::string> split_spans(std::string_view source,
                                     const KeywordTable& keywords = default_keywords());

struct Markup {
  text::ByteRange range;
  markup::Tree tree;

  bool operator==(const Markup&) const = default;
};

/// Markup of one token, or nullopt for whitespace.
std::optional<Markup> markup_of(const Token& token);

/// One markup entry per non-whitespace token.
std::vector<Markup> process_span(std::string_view source, const KeywordTable& keywords = default_keywords());

}  // namespace pide::lexer
