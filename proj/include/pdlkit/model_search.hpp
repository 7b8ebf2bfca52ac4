#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "pdlkit/semantics.hpp"
#include "pdlkit/syntax.hpp"

namespace pdl {

enum class SearchMode : std::uint8_t { Exhaustive, Random };

struct SearchBudget {
  std::size_t max_worlds = 3;
  /// Symbols of the query are always added.
  Vocabulary vocab;
  SearchMode mode = SearchMode::Exhaustive;
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  /// Upper bound on the number of structures an exhaustive run may visit.
  std::uint64_t ceiling = std::uint64_t{1} << 36;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutcomeKind : std::uint8_t { ModelFound, NoModelUpTo, ValidUpTo, Countermodel };

std::string to_string(OutcomeKind k);

struct SearchOutcome {
  OutcomeKind kind = OutcomeKind::NoModelUpTo;
  std::optional<KripkeStructure> structure;
  World world = 0;
  /// The violating pair for program judgements.
  std::optional<std::pair<World, World>> pair;
  std::size_t bound = 0;
  std::uint64_t examined = 0;

  bool found() const { return structure.has_value(); }
};

/// Structures with exactly n worlds visited by exhaustive search: the first
/// symbol (first program, else first proposition) ranges over orbit
/// representatives under world permutations, everything else over all values.
std::uint64_t exhaustive_count(std::size_t n, const Vocabulary& vocab);

SearchOutcome find_model(const Formula& f, const SearchBudget& b);
SearchOutcome check_validity(const Formula& f, const SearchBudget& b);
SearchOutcome check_program_judgement(const Program& left, const Program& right, JudgementKind kind,
                                      const SearchBudget& b);
inline SearchOutcome check_program_judgement(const ProgramJudgement& j, const SearchBudget& b) {
  return check_program_judgement(j.left, j.right, j.kind, b);
}

/// Greedily drops worlds, then edges, then true valuation bits while f stays
/// false at (the image of) u.  Throws std::invalid_argument if f holds at u.
std::pair<KripkeStructure, World> minimize_countermodel(const KripkeStructure& k, World u,
                                                        const Formula& f);

/// PDLKIT_JOBS if set to a positive integer, else 1.
unsigned default_jobs();

}  // namespace pdl
