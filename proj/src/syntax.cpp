#include "pdlkit/syntax.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdl {
namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const std::shared_ptr<const FormulaNode>& false_node() {
  static const std::shared_ptr<const FormulaNode> node = [] {
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::False;
    n->hash = mix(0x51ed27, static_cast<std::size_t>(FormulaKind::False));
    return n;
  }();
  return node;
}

}  // namespace

Formula::Formula() : node_(false_node()) {}

Formula Formula::falsum() { return Formula(); }

Formula Formula::prop(std::string name) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::Prop;
  n->hash = mix(std::hash<std::string>{}(name), static_cast<std::size_t>(FormulaKind::Prop));
  n->name = std::move(name);
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::Not;
  n->hash = mix(f.hash(), static_cast<std::size_t>(FormulaKind::Not) * 31);
  n->size = f.size() + 1;
  n->depth = f.depth() + 1;
  n->first = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::disjunction(Formula lhs, Formula rhs) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::Or;
  n->hash = mix(mix(lhs.hash(), rhs.hash()), static_cast<std::size_t>(FormulaKind::Or) * 31);
  n->size = lhs.size() + rhs.size() + 1;
  n->depth = std::max(lhs.depth(), rhs.depth()) + 1;
  n->first = std::move(lhs);
  n->second = std::move(rhs);
  return Formula(std::move(n));
}

Formula Formula::diamond(Program program, Formula body) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = FormulaKind::Diamond;
  n->hash = mix(mix(program.hash(), body.hash()), static_cast<std::size_t>(FormulaKind::Diamond) * 31);
  n->size = program.size() + body.size() + 1;
  n->depth = std::max(program.depth(), body.depth()) + 1;
  n->program = std::move(program);
  n->first = std::move(body);
  return Formula(std::move(n));
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
const Formula& Formula::operand() const { return node_->first; }
const Formula& Formula::lhs() const { return node_->first; }
const Formula& Formula::rhs() const { return node_->second; }
const Program& Formula::program() const { return node_->program; }
const Formula& Formula::body() const { return node_->first; }
std::size_t Formula::hash() const { return node_->hash; }
std::size_t Formula::size() const { return node_->size; }
std::size_t Formula::depth() const { return node_->depth; }

Program::Program() {
  static const std::shared_ptr<const ProgramNode> node = [] {
    auto n = std::make_shared<ProgramNode>();
    n->kind = ProgramKind::Test;
    n->hash = mix(Formula().hash(), static_cast<std::size_t>(ProgramKind::Test) * 131);
    n->condition = Formula();
    n->size = 2;
    n->depth = 1;
    return n;
  }();
  node_ = node;
}

Program Program::atomic(std::string name) {
  auto n = std::make_shared<ProgramNode>();
  n->kind = ProgramKind::Atomic;
  n->hash = mix(std::hash<std::string>{}(name), static_cast<std::size_t>(ProgramKind::Atomic) * 131);
  n->name = std::move(name);
  return Program(std::move(n));
}

namespace {
std::shared_ptr<ProgramNode> binary_node(ProgramKind kind, Program lhs, Program rhs) {
  auto n = std::make_shared<ProgramNode>();
  n->kind = kind;
  n->hash = mix(mix(lhs.hash(), rhs.hash()), static_cast<std::size_t>(kind) * 131);
  n->size = lhs.size() + rhs.size() + 1;
  n->depth = std::max(lhs.depth(), rhs.depth()) + 1;
  n->first = std::move(lhs);
  n->second = std::move(rhs);
  return n;
}
}  // namespace

Program Program::seq(Program first, Program second) {
  return Program(binary_node(ProgramKind::Seq, std::move(first), std::move(second)));
}
Program Program::choice(Program lhs, Program rhs) {
  return Program(binary_node(ProgramKind::Union, std::move(lhs), std::move(rhs)));
}
Program Program::inter(Program lhs, Program rhs) {
  return Program(binary_node(ProgramKind::Inter, std::move(lhs), std::move(rhs)));
}

Program Program::test(Formula condition) {
  auto n = std::make_shared<ProgramNode>();
  n->kind = ProgramKind::Test;
  n->hash = mix(condition.hash(), static_cast<std::size_t>(ProgramKind::Test) * 131);
  n->size = condition.size() + 1;
  n->depth = condition.depth() + 1;
  n->condition = std::move(condition);
  return Program(std::move(n));
}

ProgramKind Program::kind() const { return node_->kind; }
const std::string& Program::name() const { return node_->name; }
const Program& Program::lhs() const { return node_->first; }
const Program& Program::rhs() const { return node_->second; }
const Formula& Program::condition() const { return node_->condition; }
std::size_t Program::hash() const { return node_->hash; }
std::size_t Program::size() const { return node_->size; }
std::size_t Program::depth() const { return node_->depth; }

int compare(const Formula& a, const Formula& b) {
  if (a.identity() == b.identity()) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case FormulaKind::False:
      return 0;
    case FormulaKind::Prop:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case FormulaKind::Not:
      return compare(a.operand(), b.operand());
    case FormulaKind::Or:
      if (int c = compare(a.lhs(), b.lhs())) return c;
      return compare(a.rhs(), b.rhs());
    case FormulaKind::Diamond:
      if (int c = compare(a.program(), b.program())) return c;
      return compare(a.body(), b.body());
  }
  return 0;
}

int compare(const Program& a, const Program& b) {
  if (a.identity() == b.identity()) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case ProgramKind::Test:
      return compare(a.condition(), b.condition());
    default:
      if (int c = compare(a.lhs(), b.lhs())) return c;
      return compare(a.rhs(), b.rhs());
  }
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.identity() == b.identity()) return true;
  if (a.hash() != b.hash() || a.size() != b.size()) return false;
  return compare(a, b) == 0;
}
bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

bool operator==(const Program& a, const Program& b) {
  if (a.identity() == b.identity()) return true;
  if (a.hash() != b.hash() || a.size() != b.size()) return false;
  return compare(a, b) == 0;
}
bool operator<(const Program& a, const Program& b) { return compare(a, b) < 0; }

Formula verum() {
  static const Formula t = Formula::negation(Formula::falsum());
  return t;
}

Formula conj(Formula lhs, Formula rhs) {
  return Formula::negation(Formula::disjunction(Formula::negation(std::move(lhs)),
                                                Formula::negation(std::move(rhs))));
}

Formula impl(Formula lhs, Formula rhs) {
  return Formula::disjunction(Formula::negation(std::move(lhs)), std::move(rhs));
}

Formula iff(Formula lhs, Formula rhs) { return conj(impl(lhs, rhs), impl(rhs, lhs)); }

Formula box(Program program, Formula body) {
  return Formula::negation(Formula::diamond(std::move(program), Formula::negation(std::move(body))));
}

Program loop(Program body) { return Program::inter(std::move(body), Program::test(verum())); }

bool is_verum(const Formula& f) {
  return f.kind() == FormulaKind::Not && f.operand().kind() == FormulaKind::False;
}

const Program* loop_body(const Program& p) {
  if (p.kind() == ProgramKind::Inter && p.rhs().kind() == ProgramKind::Test &&
      is_verum(p.rhs().condition()))
    return &p.lhs();
  return nullptr;
}

Vocabulary Vocabulary::merged(const Vocabulary& other) const {
  Vocabulary out = *this;
  out.props.insert(other.props.begin(), other.props.end());
  out.programs.insert(other.programs.begin(), other.programs.end());
  out.validate();
  return out;
}

bool Vocabulary::contains(const Vocabulary& other) const {
  return std::includes(props.begin(), props.end(), other.props.begin(), other.props.end()) &&
         std::includes(programs.begin(), programs.end(), other.programs.begin(),
                       other.programs.end());
}

void Vocabulary::validate() const {
  for (const auto& p : props) {
    if (!is_identifier(p)) throw std::invalid_argument("invalid proposition name '" + p + "'");
    if (programs.count(p))
      throw std::invalid_argument("'" + p + "' is both a proposition and a program");
  }
  for (const auto& a : programs)
    if (!is_identifier(a)) throw std::invalid_argument("invalid program name '" + a + "'");
}

void collect_symbols(const Formula& f, Vocabulary& out) {
  switch (f.kind()) {
    case FormulaKind::False:
      return;
    case FormulaKind::Prop:
      out.props.insert(f.name());
      return;
    case FormulaKind::Not:
      collect_symbols(f.operand(), out);
      return;
    case FormulaKind::Or:
      collect_symbols(f.lhs(), out);
      collect_symbols(f.rhs(), out);
      return;
    case FormulaKind::Diamond:
      collect_symbols(f.program(), out);
      collect_symbols(f.body(), out);
      return;
  }
}

void collect_symbols(const Program& p, Vocabulary& out) {
  switch (p.kind()) {
    case ProgramKind::Atomic:
      out.programs.insert(p.name());
      return;
    case ProgramKind::Test:
      collect_symbols(p.condition(), out);
      return;
    default:
      collect_symbols(p.lhs(), out);
      collect_symbols(p.rhs(), out);
  }
}

Vocabulary symbols_of(const Formula& f) {
  Vocabulary v;
  collect_symbols(f, v);
  return v;
}

Vocabulary symbols_of(const Program& p) {
  Vocabulary v;
  collect_symbols(p, v);
  return v;
}

bool is_identifier(const std::string& name) {
  if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

}  // namespace pdl
