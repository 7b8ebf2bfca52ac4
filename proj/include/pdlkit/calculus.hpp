#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pdlkit/substitution.hpp"
#include "pdlkit/syntax.hpp"

namespace pdl {

/// Metavariable name to formula (p, q, r) or program (alpha, beta, gamma,
/// beta1, beta2, beta3).
using Binding = std::map<std::string, Term>;

bool is_formula_meta(const std::string& name);
bool is_program_meta(const std::string& name);

struct Scheme {
  std::string name;
  Statement pattern;
  bool is_program() const { return std::holds_alternative<ProgramJudgement>(pattern); }
};

/// Parses a scheme from text; p, q, r and alpha, beta, gamma are metavariables.
Scheme make_scheme(std::string name, const std::string& text);

/// The formula schemes Dl ? T1 ; D K C1 C2 C3 V, in this order.
const std::vector<Scheme>& formula_schemes();
/// The program schemes Wk Cm Ct D3 D4 T A T2 T3 D1 D2, in this order.
/// TP and C are handled as rules (see TP and check_rule_c).
const std::vector<Scheme>& program_schemes();
const Scheme* find_scheme(const std::string& name);

Statement instantiate(const Scheme& s, const Binding& b);
std::optional<Binding> match(const Scheme& s, const Statement& st);

std::optional<std::pair<std::string, Binding>> is_axiom_instance(const Formula& f);
std::optional<std::pair<std::string, Binding>> is_program_axiom_instance(const ProgramJudgement& j);

/// beta2 ; [(beta3;beta1;beta2)^]p ? ; beta3, with true? operands of the
/// inner sequence dropped.
Program rule_c_pattern(const Program& beta1, const Program& beta2, const Program& beta3, const Formula& p);
/// beta2 ; beta3 ; [(beta1;beta2;beta3)^]p ?, likewise.
Program rule_c_replacement(const Program& beta1, const Program& beta2, const Program& beta3, const Formula& p);
/// host with occurrences of `from` replaced by `to`, outside tests, scanning
/// left to right without overlap.  Returns the number of replacements.
Program replace_subprogram(const Program& host, const Program& from, const Program& to, bool all,
                           std::size_t* count = nullptr);

/// j must read host^ => host'^ with host' as above.  On failure the reason is
/// written to `diagnostic` when given.
bool check_rule_c(const ProgramJudgement& j, const Program& beta1, const Program& beta2, const Program& beta3,
                  const Formula& p, const Program& host, bool all_occurrences = true,
                  std::string* diagnostic = nullptr);

// ---------------------------------------------------------------------------
// Proofs

struct ByTaut {
  bool operator==(const ByTaut&) const = default;
};
struct ByAxiom {
  std::string name;
  std::optional<Binding> binding;
  bool operator==(const ByAxiom&) const = default;
};
struct ByProgramAxiom {
  std::string name;
  std::optional<Binding> binding;
  bool operator==(const ByProgramAxiom&) const = default;
};
struct ByMP {
  int premise;
  int implication;
  bool operator==(const ByMP&) const = default;
};
struct ByGen {
  int from;
  Program program;
  bool operator==(const ByGen&) const = default;
};
struct ByUSub {
  int from;
  std::string prop;
  Formula formula;
  bool operator==(const ByUSub&) const = default;
};
struct ByPSub {
  int from;
  int judgement;
  bool operator==(const ByPSub&) const = default;
};

enum class StructKind : std::uint8_t {
  Refl,
  Trans,
  CongSeqL,
  CongSeqR,
  CongInterL,
  CongInterR,
  CongUnionL,
  CongUnionR,
  SymIff,
  SplitIff
};
std::string to_string(StructKind k);
std::optional<StructKind> struct_kind_from_string(const std::string& s);

struct ByStruct {
  StructKind kind;
  std::vector<int> from;
  bool operator==(const ByStruct&) const = default;
};
/// phi <-> psi to phi? <=> psi?, or back.
struct ByTP {
  int from;
  bool operator==(const ByTP&) const = default;
};

using Justification = std::variant<ByTaut, ByAxiom, ByProgramAxiom, ByMP, ByGen, ByUSub, ByPSub, ByStruct, ByTP>;

struct ProofLine {
  int id = 0;
  Statement statement;
  Justification by;
  bool operator==(const ProofLine&) const = default;
};

using Proof = std::vector<ProofLine>;

struct ProofResult {
  bool ok = true;
  int line = 0;  // id of the first failing line
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Whether f is true under every assignment to its maximal non-boolean
/// subformulas (propositions and diamonds).  Throws std::length_error above
/// 24 such atoms.
bool is_tautology(const Formula& f);

/// Line ids must be 1, 2, 3, ... and references point to earlier lines.
ProofResult check_proof(const Proof& proof);

using Theory = std::set<Formula>;

/// The proof checks and its last line is f, T -> f, or (t1 & ... & tn) -> f
/// with every ti in t (any bracketing).
bool theory_derives(const Theory& t, const Formula& f, const Proof& proof, std::string* diagnostic = nullptr);

/// {"lines":[{"id":1,"stmt":"...","by":{...}}]}
Proof proof_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Proof& proof);
nlohmann::json to_json(const Binding& b);
Binding binding_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Closure properties of maximal consistent sets, checked on a finite theory
// against a finite universe of formulas.

using Entailment = std::function<bool(const Theory&, const Formula&)>;

/// Every member of `universe` entailed by t belongs to t.
bool closed_under_entailment(const Theory& t, const std::set<Formula>& universe, const Entailment& entails);
/// For every a & b in universe: a & b in t iff a in t and b in t.
bool conjunction_property(const Theory& t, const std::set<Formula>& universe);
/// For every a | b in universe: a | b in t iff a in t or b in t.
bool disjunction_property(const Theory& t, const std::set<Formula>& universe);
/// For every a with ~a in universe: a in t iff ~a not in t.
bool negation_property(const Theory& t, const std::set<Formula>& universe);

/// Subformulas of the given formulas (including those inside tests), closed
/// under a single negation.
std::set<Formula> closure_universe(const std::vector<Formula>& seeds);

}  // namespace pdl
