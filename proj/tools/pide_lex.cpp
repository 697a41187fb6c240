// Prints the tokens, command spans or markup of a proof script.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pide/lexer.hpp"
#include "pide/markup.hpp"

using namespace pide;

int main(int argc, char** argv) {
  CLI::App app{"Tokenize a proof script"};
  std::string input;
  std::string keywords_file;
  std::string mode = "tokens";
  app.add_option("file", input, "Script to read; '-' for stdin")->required();
  app.add_option("--keywords", keywords_file, "Keyword table, one keyword per line")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "What to print")->check(CLI::IsMember({"tokens", "spans", "markup"}));
  CLI11_PARSE(app, argc, argv);

  std::ostringstream buffer;
  if (input == "-") {
    buffer << std::cin.rdbuf();
  } else {
    std::ifstream file(input, std::ios::binary);
    if (!file) {
      std::cerr << "cannot read " << input << "\n";
      return 1;
    }
    buffer << file.rdbuf();
  }
  const std::string source = buffer.str();
  const auto keywords = keywords_file.empty() ? lexer::default_keywords() : lexer::KeywordTable::load(keywords_file);

  if (mode == "tokens") {
    for (const auto& t : lexer::tokenize(source, keywords))
      std::cout << lexer::kind_name(t.kind) << ' ' << t.range.start << ' ' << t.range.stop << '\n';
  } else if (mode == "spans") {
    std::size_t offset = 0;
    for (const auto& span : lexer::split_spans(source, keywords)) {
      std::cout << offset << ' ' << offset + span.size() << '\n';
      offset += span.size();
    }
  } else {
    for (const auto& m : lexer::process_span(source, keywords))
      std::cout << m.range.start << ' ' << m.range.stop << ' ' << markup::debug_string({m.tree}) << '\n';
  }
  return 0;
}
