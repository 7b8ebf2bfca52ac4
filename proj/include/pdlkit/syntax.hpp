#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace pdl {

// Core formula constructors. True, conjunction, implication, equivalence and
// boxes are expansions over these (see the free functions below).
enum class FormulaKind : std::uint8_t { False, Prop, Not, Or, Diamond };
enum class ProgramKind : std::uint8_t { Atomic, Seq, Union, Inter, Test };

struct FormulaNode;
struct ProgramNode;
class Program;

class Formula {
 public:
  /// The constant false.  Default-constructed formulas are false.
  Formula();

  static Formula falsum();
  static Formula prop(std::string name);
  static Formula negation(Formula f);
  static Formula disjunction(Formula lhs, Formula rhs);
  static Formula diamond(Program program, Formula body);

  FormulaKind kind() const;
  const std::string& name() const;    // Prop
  const Formula& operand() const;     // Not
  const Formula& lhs() const;         // Or
  const Formula& rhs() const;         // Or
  const Program& program() const;     // Diamond
  const Formula& body() const;        // Diamond

  std::size_t hash() const;
  std::size_t size() const;
  std::size_t depth() const;
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  friend struct FormulaNode;
  friend struct ProgramNode;
  struct Null {};
  explicit Formula(Null) {}
  explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FormulaNode> node_;
};

class Program {
 public:
  /// Default-constructed programs are the test false?.
  Program();

  static Program atomic(std::string name);
  static Program seq(Program first, Program second);
  static Program choice(Program lhs, Program rhs);
  static Program inter(Program lhs, Program rhs);
  static Program test(Formula condition);

  ProgramKind kind() const;
  const std::string& name() const;      // Atomic
  const Program& lhs() const;           // Seq, Union, Inter
  const Program& rhs() const;           // Seq, Union, Inter
  const Formula& condition() const;     // Test

  std::size_t hash() const;
  std::size_t size() const;
  std::size_t depth() const;
  const void* identity() const { return node_.get(); }

  friend bool operator==(const Program& a, const Program& b);
  friend bool operator<(const Program& a, const Program& b);

 private:
  friend struct FormulaNode;
  friend struct ProgramNode;
  struct Null {};
  explicit Program(Null) {}
  explicit Program(std::shared_ptr<const ProgramNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ProgramNode> node_;
};

inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
inline bool operator!=(const Program& a, const Program& b) { return !(a == b); }

int compare(const Formula& a, const Formula& b);
int compare(const Program& a, const Program& b);

struct FormulaNode {
  FormulaKind kind = FormulaKind::False;
  std::string name;
  Formula first{Formula::Null{}};
  Formula second{Formula::Null{}};
  Program program{Program::Null{}};
  std::size_t hash = 0;
  std::size_t size = 1;
  std::size_t depth = 0;
};

struct ProgramNode {
  ProgramKind kind = ProgramKind::Atomic;
  std::string name;
  Program first{Program::Null{}};
  Program second{Program::Null{}};
  Formula condition{Formula::Null{}};
  std::size_t hash = 0;
  std::size_t size = 1;
  std::size_t depth = 0;
};

// Derived connectives.
Formula verum();
Formula conj(Formula lhs, Formula rhs);
Formula impl(Formula lhs, Formula rhs);
Formula iff(Formula lhs, Formula rhs);
Formula box(Program program, Formula body);
/// alpha^loop, i.e. alpha & true?.
Program loop(Program body);

bool is_verum(const Formula& f);
/// Recognises a & true? and returns its body.
const Program* loop_body(const Program& p);

enum class JudgementKind : std::uint8_t { Implies, Equiv };

/// alpha => beta or alpha <=> beta.
struct ProgramJudgement {
  JudgementKind kind = JudgementKind::Implies;
  Program left;
  Program right;

  friend bool operator==(const ProgramJudgement& a, const ProgramJudgement& b) {
    return a.kind == b.kind && a.left == b.left && a.right == b.right;
  }
};

using Statement = std::variant<Formula, ProgramJudgement>;

struct Vocabulary {
  std::set<std::string> props;
  std::set<std::string> programs;

  bool empty() const { return props.empty() && programs.empty(); }
  /// Union of both vocabularies; throws std::invalid_argument if a name
  /// would end up in both sorts.
  Vocabulary merged(const Vocabulary& other) const;
  bool contains(const Vocabulary& other) const;
  void validate() const;

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

Vocabulary symbols_of(const Formula& f);
Vocabulary symbols_of(const Program& p);
void collect_symbols(const Formula& f, Vocabulary& out);
void collect_symbols(const Program& p, Vocabulary& out);

bool is_identifier(const std::string& name);

}  // namespace pdl

template <>
struct std::hash<pdl::Formula> {
  std::size_t operator()(const pdl::Formula& f) const noexcept { return f.hash(); }
};
template <>
struct std::hash<pdl::Program> {
  std::size_t operator()(const pdl::Program& p) const noexcept { return p.hash(); }
};
