#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pdlkit/syntax.hpp"

namespace pdl {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Without a vocabulary, identifiers are sorted by position: a name directly
// followed by '?' or appearing in formula position is a proposition, a name in
// program position is an atomic program.  With a vocabulary, every identifier
// must be declared with the sort its position demands.
Formula parse_formula(std::string_view text);
Formula parse_formula(std::string_view text, const Vocabulary& vocab);
Program parse_program(std::string_view text);
Program parse_program(std::string_view text, const Vocabulary& vocab);
ProgramJudgement parse_judgement(std::string_view text);
ProgramJudgement parse_judgement(std::string_view text, const Vocabulary& vocab);
/// A judgement if the text contains '=>' or '<=>', otherwise a formula.
Statement parse_statement(std::string_view text);
Statement parse_statement(std::string_view text, const Vocabulary& vocab);

struct RenderOptions {
  /// Print true, &, ->, <->, [a] and a^ instead of their expansions.
  bool sugar = true;
};

std::string render(const Formula& f, RenderOptions options = {});
std::string render(const Program& p, RenderOptions options = {});
std::string render(const ProgramJudgement& j, RenderOptions options = {});
std::string render(const Statement& s, RenderOptions options = {});

std::ostream& operator<<(std::ostream& os, const Formula& f);
std::ostream& operator<<(std::ostream& os, const Program& p);
std::ostream& operator<<(std::ostream& os, const ProgramJudgement& j);

/// Text of the concrete grammar, printed by `pdlkit --ascii-help`.
std::string_view grammar_summary();

}  // namespace pdl
