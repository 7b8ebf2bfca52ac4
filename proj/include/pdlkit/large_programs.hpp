#pragma once

// Large programs: programs whose tests range over finite sets of formulas.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pdlkit/substitution.hpp"
#include "pdlkit/syntax.hpp"

namespace pdl {

using FormulaSet = std::set<Formula>;

enum class LargeKind : std::uint8_t {
  Atomic,
  Inter,
  SeqTest,
  /// A bare test set X?.  Only produced by loop_left_right_programs, where
  /// the chains start or end in true?.
  Test
};

class LargeProgram {
 public:
  static LargeProgram atomic(std::string name);
  static LargeProgram inter(LargeProgram lhs, LargeProgram rhs);
  /// lhs ; X? ; rhs.  Throws std::invalid_argument if X is empty.
  static LargeProgram seq_test(LargeProgram lhs, FormulaSet tests, LargeProgram rhs);
  static LargeProgram test(FormulaSet tests);

  LargeKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const FormulaSet& tests() const { return tests_; }  // SeqTest, Test
  const LargeProgram& lhs() const { return parts_.at(0); }
  const LargeProgram& rhs() const { return parts_.at(1); }
  const std::vector<LargeProgram>& parts() const { return parts_; }

  /// Product of the test-set sizes.
  std::size_t instance_count() const;

  friend bool operator==(const LargeProgram&, const LargeProgram&) = default;

 private:
  LargeKind kind_ = LargeKind::Atomic;
  std::string name_;
  FormulaSet tests_;
  std::vector<LargeProgram> parts_;
};

/// alpha^loop for a large alpha.
struct LargeLoop {
  LargeProgram body;
  friend bool operator==(const LargeLoop&, const LargeLoop&) = default;
};

/// Phi -alpha-> Psi with finite label sets.
struct LabelledTransition {
  FormulaSet left;
  LargeProgram program;
  FormulaSet right;
};

class LiftError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Replaces every test phi? by {phi}?.  The input must be built from atomic
/// programs, intersections and sequences whose tests sit strictly between
/// two non-test factors (a;b needs padding to a;true?;b).  Sequences are
/// rebuilt left-associated.  Throws LiftError otherwise.
LargeProgram lift(const Program& a);
/// lift for alpha & true?.  Throws LiftError if a is not a loop.
LargeLoop lift_loop(const Program& a);

/// Instance relation; sequences are compared modulo associativity.
bool is_instance(const Program& a, const LargeProgram& l);
bool is_instance(const Program& a, const LargeLoop& l);

/// All instances, sequences left-associated, in a fixed order.
std::vector<Program> enumerate_instances(const LargeProgram& l);

/// Every instance of l1 is an instance of l2.  Decided on the flattened
/// sequence chains: same shape and pointwise test-set inclusion.
bool leq(const LargeProgram& l1, const LargeProgram& l2);

/// Occurrences are paths of part indices from the root ([] is the root).
/// For a SeqTest node the path also names its test set.
std::map<Path, LargeProgram> occurrences(const LargeProgram& l);

/// l(beta) and r(beta) for every occurrence beta.
std::map<Path, std::pair<FormulaSet, FormulaSet>> left_right_sets(const LabelledTransition& t);

/// lp(X) and rp(X) for every SeqTest occurrence of the loop body, with
/// lp(phi) = rp(phi) = {true}?.  Throws std::invalid_argument if phi is
/// empty and the body has a test.
std::map<Path, std::pair<LargeProgram, LargeProgram>> loop_left_right_programs(const LargeLoop& l,
                                                                               const FormulaSet& phi);

/// No occurrence beta, instance beta' of beta and psi in r(beta) with
/// [beta']~psi in l(beta).  Test sets are not checked for consistency.
bool is_consistent_transition(const LabelledTransition& t);

/// is_consistent_transition(phi, body, phi) and no test set X contains
/// [(b1;f?;b2)^]false with b1 an instance of rp(X), b2 an instance of lp(X)
/// and f in phi.  The second clause is vacuous for an empty phi.
bool is_consistent_loop(const LargeLoop& l, const FormulaSet& phi);

/// For each SeqTest occurrence beta = b1;X?;b2: the members of
/// {f | [b1']f in l(beta)} and {<b2'>psi | psi in r(beta)} missing from X.
/// Occurrences with nothing missing are omitted.
std::map<Path, FormulaSet> saturation_gap(const LabelledTransition& t);

/// saturation_gap(phi, body, phi) plus the loop requirement
/// {<(b1;f?;b2)^>true | b1 inst. of lp(X), b2 inst. of rp(X), f in phi}.
std::map<Path, FormulaSet> loop_saturation_gap(const LargeLoop& l, const FormulaSet& phi);

/// a;{p, q}?;b with {true}? for bare tests.
std::string render(const LargeProgram& l);

// JSON: a large program is either a program string (lifted) or one of
// {"atomic":"a"}, {"inter":[L,L]}, {"seq":[L,["p","q"],L]}, {"test":["true"]}.
LargeProgram large_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LargeProgram& l);
FormulaSet formula_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FormulaSet& s);
/// {"left":[..],"program":L,"right":[..]}
LabelledTransition transition_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LabelledTransition& t);

}  // namespace pdl
