#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pdlkit/syntax.hpp"

namespace pdl {

enum class Polarity : std::uint8_t { Positive, Negative };

/// Child indices from the root of a term.  Not: 0.  Or: 0 left, 1 right.
/// Diamond: 0 program, 1 body.  Seq/Union/Inter: 0 left, 1 right.  Test: 0.
using Path = std::vector<std::uint8_t>;
using Term = std::variant<Formula, Program>;

std::string to_string(const Path& path);
Path path_from_string(const std::string& text);

/// Throws std::out_of_range if the path leaves the term.
Term subterm_at(const Term& root, const Path& path);
/// Replaces the subterm at `path`; the replacement must have the same sort.
Term replace_at(const Term& root, const Path& path, const Term& replacement);

/// f[replacement/p], including occurrences inside tests.
Formula usub(const Formula& f, const Formula& replacement, const std::string& p);
Program usub(const Program& a, const Formula& replacement, const std::string& p);

struct Occurrence {
  Path path;
  Polarity polarity;
  friend bool operator==(const Occurrence&, const Occurrence&) = default;
};

/// Diamonds <old>. outside of tests, with the parity of enclosing negations.
/// Diamonds inside test formulas are not reported.
std::vector<Occurrence> polarity_of_occurrences(const Formula& f, const Program& old);

/// Replaces <old> by <replacement> at every positive occurrence reported by
/// polarity_of_occurrences.
Formula psub(const Formula& f, const Program& old, const Program& replacement);

}  // namespace pdl
