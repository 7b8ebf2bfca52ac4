#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdlkit/substitution.hpp"
#include "pdlkit/syntax.hpp"

namespace pdl {

enum class ProgramClass : std::uint8_t { Cyc, Forw, Neither };

std::string to_string(ProgramClass c);

/// Forw ::= a | Forw & Forw | Forw ; Cyc ; Forw
/// Cyc  ::= phi? | Forw & phi?
/// The ternary production is accepted under either association.
ProgramClass classify(const Program& a);

/// phi? gives phi, F & phi? gives <F^loop>true & phi.
/// Throws std::invalid_argument unless classify(a) == Cyc.
Formula cyc_to_test(const Program& a);

struct RewriteStep {
  std::vector<std::string> axioms;  // schemes used, in order of application
  Path position;
  Term before;
  Term after;
};

std::string axioms_label(const RewriteStep& step);

struct RewriteTrace {
  std::vector<RewriteStep> steps;
};

/// Rewrites every step in order; throws std::logic_error if a step's
/// `before` does not match the current subterm at its position.
Term replay(const Term& input, const RewriteTrace& trace);

/// Union lifted to the top of each modality and split with (D); every
/// remaining program is Forw or a loop F^loop inside <F^loop>true; tests at
/// the ends of a modality are pulled out as conjuncts.
std::pair<Formula, RewriteTrace> normalize(const Formula& f);

/// The same program pass without an enclosing modality: a union of
/// alternatives, each of the shape c0? ; F ; c1? with trivial tests omitted,
/// or a single test.
std::pair<Program, RewriteTrace> normalize_program_in_context(const Program& a);

/// Every program under a diamond of f (including inside tests) is Cyc or
/// Forw, and no diamond carries a Cyc program other than F^loop with body true.
bool in_normal_form(const Formula& f);

}  // namespace pdl
