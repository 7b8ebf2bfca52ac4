#include "pdlkit/calculus.hpp"

#include <stdexcept>
#include <unordered_map>

#include "pdlkit/parser.hpp"

namespace pdl {

using nlohmann::json;

bool is_formula_meta(const std::string& name) { return name == "p" || name == "q" || name == "r"; }

bool is_program_meta(const std::string& name) {
  return name == "alpha" || name == "beta" || name == "gamma" || name == "beta1" || name == "beta2" ||
         name == "beta3";
}

Scheme make_scheme(std::string name, const std::string& text) {
  return Scheme{std::move(name), parse_statement(text)};
}

const std::vector<Scheme>& formula_schemes() {
  static const std::vector<Scheme> schemes = {
      make_scheme("Dl", "[alpha]p <-> ~<alpha>~p"),
      make_scheme("?", "<p?>q <-> p & q"),
      make_scheme("T1", "<alpha & p?>q <-> <alpha^>(p & q)"),
      make_scheme(";", "[alpha;beta]p <-> [alpha][beta]p"),
      make_scheme("D", "<alpha + beta>p <-> <alpha>p | <beta>p"),
      make_scheme("K", "[alpha](p -> q) -> [alpha]p -> [alpha]q"),
      make_scheme("C1", "<alpha^>p & <beta^>q -> <(alpha;beta)^>(p & q)"),
      make_scheme("C2", "[alpha^]p & [beta^]p -> [alpha^;beta^]p"),
      make_scheme("C3", "<alpha^>p & [alpha^]q -> p & q"),
      make_scheme("V", "<alpha;(p | q)?;beta>r <-> <alpha;p?;beta>r | <alpha;q?;beta>r"),
  };
  return schemes;
}

const std::vector<Scheme>& program_schemes() {
  static const std::vector<Scheme> schemes = {
      make_scheme("Wk", "alpha & beta => alpha"),
      make_scheme("Cm", "alpha & beta <=> beta & alpha"),
      make_scheme("Ct", "alpha & alpha <=> alpha"),
      make_scheme("D3", "(alpha + beta);gamma <=> (alpha;gamma) + (beta;gamma)"),
      make_scheme("D4", "alpha;(beta + gamma) <=> (alpha;beta) + (alpha;gamma)"),
      make_scheme("T", "alpha & p? <=> (<alpha^>p)?"),
      make_scheme("A", "alpha & (beta & gamma) <=> (alpha & beta) & gamma"),
      make_scheme("T2", "(alpha;p?) & beta <=> (alpha & beta);p?"),
      make_scheme("T3", "(p?;alpha) & beta <=> p?;(alpha & beta)"),
      make_scheme("D1", "alpha & (beta + gamma) <=> (alpha & beta) + (alpha & gamma)"),
      make_scheme("D2", "alpha + (beta & gamma) <=> (alpha + beta) & (alpha + gamma)"),
  };
  return schemes;
}

const Scheme* find_scheme(const std::string& name) {
  for (const auto* list : {&formula_schemes(), &program_schemes()})
    for (const auto& s : *list)
      if (s.name == name) return &s;
  return nullptr;
}

namespace {

Formula inst(const Formula& f, const Binding& b);

Program inst(const Program& a, const Binding& b) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      if (is_program_meta(a.name())) {
        auto it = b.find(a.name());
        if (it == b.end()) throw std::invalid_argument("binding lacks metavariable '" + a.name() + "'");
        if (!std::holds_alternative<Program>(it->second))
          throw std::invalid_argument("metavariable '" + a.name() + "' must be bound to a program");
        return std::get<Program>(it->second);
      }
      return a;
    case ProgramKind::Test:
      return Program::test(inst(a.condition(), b));
    case ProgramKind::Seq:
      return Program::seq(inst(a.lhs(), b), inst(a.rhs(), b));
    case ProgramKind::Union:
      return Program::choice(inst(a.lhs(), b), inst(a.rhs(), b));
    case ProgramKind::Inter:
      return Program::inter(inst(a.lhs(), b), inst(a.rhs(), b));
  }
  return a;
}

Formula inst(const Formula& f, const Binding& b) {
  switch (f.kind()) {
    case FormulaKind::False:
      return f;
    case FormulaKind::Prop:
      if (is_formula_meta(f.name())) {
        auto it = b.find(f.name());
        if (it == b.end()) throw std::invalid_argument("binding lacks metavariable '" + f.name() + "'");
        if (!std::holds_alternative<Formula>(it->second))
          throw std::invalid_argument("metavariable '" + f.name() + "' must be bound to a formula");
        return std::get<Formula>(it->second);
      }
      return f;
    case FormulaKind::Not:
      return Formula::negation(inst(f.operand(), b));
    case FormulaKind::Or:
      return Formula::disjunction(inst(f.lhs(), b), inst(f.rhs(), b));
    case FormulaKind::Diamond:
      return Formula::diamond(inst(f.program(), b), inst(f.body(), b));
  }
  return f;
}

bool bind_meta(Binding& b, const std::string& name, const Term& t) {
  auto [it, fresh] = b.emplace(name, t);
  return fresh || it->second == t;
}

bool unify(const Formula& pat, const Formula& f, Binding& b);

bool unify(const Program& pat, const Program& a, Binding& b) {
  if (pat.kind() == ProgramKind::Atomic && is_program_meta(pat.name())) return bind_meta(b, pat.name(), Term(a));
  if (pat.kind() != a.kind()) return false;
  switch (pat.kind()) {
    case ProgramKind::Atomic:
      return pat.name() == a.name();
    case ProgramKind::Test:
      return unify(pat.condition(), a.condition(), b);
    default:
      return unify(pat.lhs(), a.lhs(), b) && unify(pat.rhs(), a.rhs(), b);
  }
}

bool unify(const Formula& pat, const Formula& f, Binding& b) {
  if (pat.kind() == FormulaKind::Prop && is_formula_meta(pat.name())) return bind_meta(b, pat.name(), Term(f));
  if (pat.kind() != f.kind()) return false;
  switch (pat.kind()) {
    case FormulaKind::False:
      return true;
    case FormulaKind::Prop:
      return pat.name() == f.name();
    case FormulaKind::Not:
      return unify(pat.operand(), f.operand(), b);
    case FormulaKind::Or:
      return unify(pat.lhs(), f.lhs(), b) && unify(pat.rhs(), f.rhs(), b);
    case FormulaKind::Diamond:
      return unify(pat.program(), f.program(), b) && unify(pat.body(), f.body(), b);
  }
  return false;
}

}  // namespace

Statement instantiate(const Scheme& s, const Binding& b) {
  if (const auto* f = std::get_if<Formula>(&s.pattern)) return inst(*f, b);
  const auto& j = std::get<ProgramJudgement>(s.pattern);
  return ProgramJudgement{j.kind, inst(j.left, b), inst(j.right, b)};
}

std::optional<Binding> match(const Scheme& s, const Statement& st) {
  Binding b;
  if (const auto* pf = std::get_if<Formula>(&s.pattern)) {
    const auto* f = std::get_if<Formula>(&st);
    if (f && unify(*pf, *f, b)) return b;
    return std::nullopt;
  }
  const auto& pj = std::get<ProgramJudgement>(s.pattern);
  const auto* j = std::get_if<ProgramJudgement>(&st);
  if (j && j->kind == pj.kind && unify(pj.left, j->left, b) && unify(pj.right, j->right, b)) return b;
  return std::nullopt;
}

std::optional<std::pair<std::string, Binding>> is_axiom_instance(const Formula& f) {
  for (const auto& s : formula_schemes())
    if (auto b = match(s, f)) return std::make_pair(s.name, *b);
  return std::nullopt;
}

std::optional<std::pair<std::string, Binding>> is_program_axiom_instance(const ProgramJudgement& j) {
  for (const auto& s : program_schemes())
    if (auto b = match(s, j)) return std::make_pair(s.name, *b);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rule C

namespace {
bool is_true_test(const Program& a) { return a.kind() == ProgramKind::Test && is_verum(a.condition()); }

Program seq_skipping_true(std::initializer_list<Program> parts) {
  std::optional<Program> out;
  for (const auto& p : parts) {
    if (is_true_test(p)) continue;
    out = out ? Program::seq(*out, p) : p;
  }
  return out ? *out : Program::test(verum());
}
}  // namespace

Program rule_c_pattern(const Program& beta1, const Program& beta2, const Program& beta3, const Formula& p) {
  const Formula test = box(loop(seq_skipping_true({beta3, beta1, beta2})), p);
  return seq_skipping_true({beta2, Program::test(test), beta3});
}

Program rule_c_replacement(const Program& beta1, const Program& beta2, const Program& beta3, const Formula& p) {
  const Formula test = box(loop(seq_skipping_true({beta1, beta2, beta3})), p);
  return seq_skipping_true({beta2, beta3, Program::test(test)});
}

Program replace_subprogram(const Program& host, const Program& from, const Program& to, bool all,
                           std::size_t* count) {
  std::size_t local = 0;
  std::size_t& n = count ? *count : local;
  n = 0;
  std::function<Program(const Program&)> go = [&](const Program& a) -> Program {
    if ((all || n == 0) && a == from) {
      ++n;
      return to;
    }
    switch (a.kind()) {
      case ProgramKind::Atomic:
      case ProgramKind::Test:
        return a;
      default: {
        Program l = go(a.lhs());
        Program r = go(a.rhs());
        if (l == a.lhs() && r == a.rhs()) return a;
        if (a.kind() == ProgramKind::Seq) return Program::seq(l, r);
        if (a.kind() == ProgramKind::Union) return Program::choice(l, r);
        return Program::inter(l, r);
      }
    }
  };
  return go(host);
}

bool check_rule_c(const ProgramJudgement& j, const Program& beta1, const Program& beta2, const Program& beta3,
                  const Formula& p, const Program& host, bool all_occurrences, std::string* diagnostic) {
  auto fail = [&](const std::string& why) {
    if (diagnostic) *diagnostic = why;
    return false;
  };
  if (j.kind != JudgementKind::Implies) return fail("rule C concludes an => judgement");
  std::size_t n = 0;
  const Program pattern = rule_c_pattern(beta1, beta2, beta3, p);
  const Program rewritten =
      replace_subprogram(host, pattern, rule_c_replacement(beta1, beta2, beta3, p), all_occurrences, &n);
  if (n == 0) return fail("pattern " + render(pattern) + " does not occur in " + render(host));
  if (j.left != loop(host)) return fail("left side must be " + render(loop(host)));
  if (j.right != loop(rewritten)) return fail("right side must be " + render(loop(rewritten)));
  return true;
}

// ---------------------------------------------------------------------------
// Tautologies

namespace {

struct Atoms {
  std::unordered_map<Formula, std::size_t> index;

  void collect(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::False:
        return;
      case FormulaKind::Not:
        collect(f.operand());
        return;
      case FormulaKind::Or:
        collect(f.lhs());
        collect(f.rhs());
        return;
      default:
        index.emplace(f, index.size());
    }
  }

  bool eval(const Formula& f, std::uint32_t v) const {
    switch (f.kind()) {
      case FormulaKind::False:
        return false;
      case FormulaKind::Not:
        return !eval(f.operand(), v);
      case FormulaKind::Or:
        return eval(f.lhs(), v) || eval(f.rhs(), v);
      default:
        return (v >> index.at(f)) & 1U;
    }
  }
};

}  // namespace

bool is_tautology(const Formula& f) {
  Atoms atoms;
  atoms.collect(f);
  if (atoms.index.size() > 24) throw std::length_error("tautology check: more than 24 atoms");
  const std::uint32_t rows = std::uint32_t{1} << atoms.index.size();
  for (std::uint32_t v = 0; v < rows; ++v)
    if (!atoms.eval(f, v)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Proof checking

std::string to_string(StructKind k) {
  switch (k) {
    case StructKind::Refl: return "Refl";
    case StructKind::Trans: return "Trans";
    case StructKind::CongSeqL: return "CongSeqL";
    case StructKind::CongSeqR: return "CongSeqR";
    case StructKind::CongInterL: return "CongInterL";
    case StructKind::CongInterR: return "CongInterR";
    case StructKind::CongUnionL: return "CongUnionL";
    case StructKind::CongUnionR: return "CongUnionR";
    case StructKind::SymIff: return "SymIff";
    case StructKind::SplitIff: return "SplitIff";
  }
  return "?";
}

std::optional<StructKind> struct_kind_from_string(const std::string& s) {
  for (auto k : {StructKind::Refl, StructKind::Trans, StructKind::CongSeqL, StructKind::CongSeqR,
                 StructKind::CongInterL, StructKind::CongInterR, StructKind::CongUnionL, StructKind::CongUnionR,
                 StructKind::SymIff, StructKind::SplitIff})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

namespace {

struct LineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a -> b is ~a | b.
std::optional<std::pair<Formula, Formula>> split_impl(const Formula& f) {
  if (f.kind() != FormulaKind::Or || f.lhs().kind() != FormulaKind::Not) return std::nullopt;
  return std::make_pair(f.lhs().operand(), f.rhs());
}

// a & b is ~(~a | ~b).
std::optional<std::pair<Formula, Formula>> split_conj(const Formula& f) {
  if (f.kind() != FormulaKind::Not) return std::nullopt;
  const Formula& o = f.operand();
  if (o.kind() != FormulaKind::Or || o.lhs().kind() != FormulaKind::Not || o.rhs().kind() != FormulaKind::Not)
    return std::nullopt;
  return std::make_pair(o.lhs().operand(), o.rhs().operand());
}

std::optional<std::pair<Formula, Formula>> split_iff(const Formula& f) {
  auto c = split_conj(f);
  if (!c) return std::nullopt;
  auto l = split_impl(c->first);
  auto r = split_impl(c->second);
  if (!l || !r || l->first != r->second || l->second != r->first) return std::nullopt;
  return l;
}

class Checker {
 public:
  void add(const ProofLine& line) {
    if (line.id != static_cast<int>(lines_.size()) + 1)
      throw LineError("line ids must run 1, 2, 3, ... (expected " + std::to_string(lines_.size() + 1) + ")");
    std::visit([&](const auto& by) { check(line.statement, by); }, line.by);
    lines_.emplace(line.id, line.statement);
  }

 private:
  std::map<int, Statement> lines_;

  const Statement& ref(int id) const {
    auto it = lines_.find(id);
    if (it == lines_.end()) throw LineError("reference to unknown or later line " + std::to_string(id));
    return it->second;
  }
  const Formula& formula(int id) const {
    const auto* f = std::get_if<Formula>(&ref(id));
    if (!f) throw LineError("line " + std::to_string(id) + " is not a formula");
    return *f;
  }
  const ProgramJudgement& judgement(int id) const {
    const auto* j = std::get_if<ProgramJudgement>(&ref(id));
    if (!j) throw LineError("line " + std::to_string(id) + " is not a program judgement");
    return *j;
  }
  static const Formula& as_formula(const Statement& s) {
    const auto* f = std::get_if<Formula>(&s);
    if (!f) throw LineError("statement must be a formula");
    return *f;
  }
  static const ProgramJudgement& as_judgement(const Statement& s) {
    const auto* j = std::get_if<ProgramJudgement>(&s);
    if (!j) throw LineError("statement must be a program judgement");
    return *j;
  }
  static void expect(bool ok, const std::string& why) {
    if (!ok) throw LineError(why);
  }

  void check(const Statement& s, const ByTaut&) {
    expect(is_tautology(as_formula(s)), "not a propositional tautology");
  }

  void check_scheme(const Statement& s, const std::string& name, const std::optional<Binding>& b, bool program) {
    const Scheme* scheme = find_scheme(name);
    expect(scheme != nullptr, "unknown scheme '" + name + "'");
    expect(scheme->is_program() == program,
           "scheme '" + name + "' is a " + (program ? "formula" : "program") + " scheme");
    if (b) {
      Statement expected;
      try {
        expected = instantiate(*scheme, *b);
      } catch (const std::invalid_argument& e) {
        throw LineError(e.what());
      }
      expect(expected == s, "binding instantiates '" + name + "' to " + render(expected));
    } else {
      expect(match(*scheme, s).has_value(), "not an instance of '" + name + "'");
    }
  }

  void check(const Statement& s, const ByAxiom& by) { check_scheme(s, by.name, by.binding, false); }

  void check(const Statement& s, const ByProgramAxiom& by) {
    if (by.name != "C") {
      check_scheme(s, by.name, by.binding, true);
      return;
    }
    expect(by.binding.has_value(), "rule C needs a binding for beta1, beta2, beta3 and p");
    const auto& j = as_judgement(s);
    const Program* host = loop_body(j.left);
    expect(host != nullptr, "rule C: left side must be a loop");
    auto prog = [&](const char* k) {
      auto it = by.binding->find(k);
      expect(it != by.binding->end() && std::holds_alternative<Program>(it->second),
             std::string("rule C: missing program ") + k);
      return std::get<Program>(it->second);
    };
    auto it = by.binding->find("p");
    expect(it != by.binding->end() && std::holds_alternative<Formula>(it->second), "rule C: missing formula p");
    std::string why;
    expect(check_rule_c(j, prog("beta1"), prog("beta2"), prog("beta3"), std::get<Formula>(it->second), *host,
                        true, &why),
           "rule C: " + why);
  }

  void check(const Statement& s, const ByMP& by) {
    const Formula& a = formula(by.premise);
    const Formula& b = formula(by.implication);
    const Formula& c = as_formula(s);
    auto ok = [&](const Formula& x, const Formula& imp) {
      auto parts = split_impl(imp);
      return parts && parts->first == x && parts->second == c;
    };
    expect(ok(a, b) || ok(b, a), "MP: premises do not yield the statement");
  }

  void check(const Statement& s, const ByGen& by) {
    expect(as_formula(s) == box(by.program, formula(by.from)), "Gen: statement must be [program] of the premise");
  }

  void check(const Statement& s, const ByUSub& by) {
    const Statement& prem = ref(by.from);
    if (const auto* f = std::get_if<Formula>(&prem)) {
      expect(as_formula(s) == usub(*f, by.formula, by.prop), "USub: statement differs from the substitution");
    } else {
      const auto& j = std::get<ProgramJudgement>(prem);
      ProgramJudgement out{j.kind, usub(j.left, by.formula, by.prop), usub(j.right, by.formula, by.prop)};
      expect(as_judgement(s) == out, "USub: statement differs from the substitution");
    }
  }

  void check(const Statement& s, const ByPSub& by) {
    const auto& j = judgement(by.judgement);
    expect(j.kind == JudgementKind::Implies, "PSub: line " + std::to_string(by.judgement) + " must be an => judgement");
    expect(as_formula(s) == psub(formula(by.from), j.left, j.right),
           "PSub: statement differs from the positive replacement");
  }

  void check(const Statement& s, const ByTP& by) {
    const Statement& prem = ref(by.from);
    if (const auto* f = std::get_if<Formula>(&prem)) {
      auto parts = split_iff(*f);
      expect(parts.has_value(), "TP: premise must be an equivalence");
      ProgramJudgement out{JudgementKind::Equiv, Program::test(parts->first), Program::test(parts->second)};
      expect(as_judgement(s) == out, "TP: statement must be " + render(out));
    } else {
      const auto& j = std::get<ProgramJudgement>(prem);
      expect(j.kind == JudgementKind::Equiv && j.left.kind() == ProgramKind::Test &&
                 j.right.kind() == ProgramKind::Test,
             "TP: premise must read phi? <=> psi?");
      expect(as_formula(s) == iff(j.left.condition(), j.right.condition()), "TP: statement must be the equivalence");
    }
  }

  void check(const Statement& s, const ByStruct& by) {
    const auto& out = as_judgement(s);
    auto arity = [&](std::size_t n) {
      expect(by.from.size() == n, to_string(by.kind) + " takes " + std::to_string(n) + " premise(s)");
    };
    // The conclusion may weaken <=> to =>.
    auto kind_ok = [&](JudgementKind premise) { return out.kind == premise || out.kind == JudgementKind::Implies; };
    switch (by.kind) {
      case StructKind::Refl:
        arity(0);
        expect(out.left == out.right, "Refl: sides differ");
        return;
      case StructKind::Trans: {
        arity(2);
        const auto& a = judgement(by.from[0]);
        const auto& b = judgement(by.from[1]);
        expect(a.right == b.left, "Trans: middle programs differ");
        expect(out.left == a.left && out.right == b.right, "Trans: statement does not chain the premises");
        const auto k = (a.kind == JudgementKind::Equiv && b.kind == JudgementKind::Equiv) ? JudgementKind::Equiv
                                                                                            : JudgementKind::Implies;
        expect(kind_ok(k), "Trans: <=> needs two <=> premises");
        return;
      }
      case StructKind::SymIff: {
        arity(1);
        const auto& a = judgement(by.from[0]);
        expect(a.kind == JudgementKind::Equiv && out.kind == JudgementKind::Equiv, "SymIff: needs <=>");
        expect(out.left == a.right && out.right == a.left, "SymIff: sides not swapped");
        return;
      }
      case StructKind::SplitIff: {
        arity(1);
        const auto& a = judgement(by.from[0]);
        expect(a.kind == JudgementKind::Equiv && out.kind == JudgementKind::Implies,
               "SplitIff: from <=> to =>");
        expect((out.left == a.left && out.right == a.right) || (out.left == a.right && out.right == a.left),
               "SplitIff: sides differ from the premise");
        return;
      }
      default:
        break;
    }
    arity(1);
    const auto& a = judgement(by.from[0]);
    expect(kind_ok(a.kind), to_string(by.kind) + ": cannot strengthen => to <=>");
    ProgramKind op = ProgramKind::Seq;
    bool left = true;
    switch (by.kind) {
      case StructKind::CongSeqL: op = ProgramKind::Seq; left = true; break;
      case StructKind::CongSeqR: op = ProgramKind::Seq; left = false; break;
      case StructKind::CongInterL: op = ProgramKind::Inter; left = true; break;
      case StructKind::CongInterR: op = ProgramKind::Inter; left = false; break;
      case StructKind::CongUnionL: op = ProgramKind::Union; left = true; break;
      case StructKind::CongUnionR: op = ProgramKind::Union; left = false; break;
      default: break;
    }
    expect(out.left.kind() == op && out.right.kind() == op, to_string(by.kind) + ": wrong program operator");
    const Program& l1 = left ? out.left.lhs() : out.left.rhs();
    const Program& r1 = left ? out.right.lhs() : out.right.rhs();
    const Program& l2 = left ? out.left.rhs() : out.left.lhs();
    const Program& r2 = left ? out.right.rhs() : out.right.lhs();
    expect(l1 == a.left && r1 == a.right, to_string(by.kind) + ": premise is not in the rewritten position");
    expect(l2 == r2, to_string(by.kind) + ": context differs between the sides");
  }
};

}  // namespace

ProofResult check_proof(const Proof& proof) {
  Checker checker;
  for (const auto& line : proof) {
    try {
      checker.add(line);
    } catch (const LineError& e) {
      return ProofResult{false, line.id, e.what()};
    } catch (const std::exception& e) {
      return ProofResult{false, line.id, e.what()};
    }
  }
  if (proof.empty()) return ProofResult{false, 0, "empty proof"};
  return ProofResult{};
}

namespace {
bool conjunction_of_members(const Formula& a, const Theory& t) {
  if (t.count(a) || is_verum(a)) return true;
  auto parts = split_conj(a);
  return parts && conjunction_of_members(parts->first, t) && conjunction_of_members(parts->second, t);
}
}  // namespace

bool theory_derives(const Theory& t, const Formula& f, const Proof& proof, std::string* diagnostic) {
  auto fail = [&](const std::string& why) {
    if (diagnostic) *diagnostic = why;
    return false;
  };
  auto r = check_proof(proof);
  if (!r) return fail("line " + std::to_string(r.line) + ": " + r.reason);
  const auto* last = std::get_if<Formula>(&proof.back().statement);
  if (!last) return fail("last line is a program judgement");
  if (*last == f) return true;
  auto parts = split_impl(*last);
  if (parts && parts->second == f && conjunction_of_members(parts->first, t)) return true;
  return fail("last line is not (conjunction of theory members) -> " + render(f));
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const Binding& b) {
  json out = json::object();
  for (const auto& [k, v] : b)
    out[k] = std::holds_alternative<Formula>(v) ? render(std::get<Formula>(v)) : render(std::get<Program>(v));
  return out;
}

Binding binding_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("binding must be an object");
  Binding b;
  for (const auto& [k, v] : j.items()) {
    const auto text = v.get<std::string>();
    if (is_formula_meta(k))
      b.emplace(k, parse_formula(text));
    else if (is_program_meta(k))
      b.emplace(k, parse_program(text));
    else
      throw std::invalid_argument("unknown metavariable '" + k + "'");
  }
  return b;
}

namespace {

std::vector<int> refs(const json& j) {
  if (j.is_number_integer()) return {j.get<int>()};
  if (j.is_array()) return j.get<std::vector<int>>();
  throw std::invalid_argument("\"from\" must be a line id or a list of ids");
}

int single_ref(const json& by) {
  auto r = refs(by.at("from"));
  if (r.size() != 1) throw std::invalid_argument("\"from\" must name one line");
  return r.front();
}

Justification justification_from_json(const json& by) {
  if (!by.is_object()) throw std::invalid_argument("\"by\" must be an object");
  std::optional<Binding> binding;
  if (by.contains("binding")) binding = binding_from_json(by.at("binding"));
  if (by.contains("axiom")) return ByAxiom{by.at("axiom").get<std::string>(), binding};
  if (by.contains("paxiom")) return ByProgramAxiom{by.at("paxiom").get<std::string>(), binding};
  if (by.contains("struct")) {
    auto kind = struct_kind_from_string(by.at("struct").get<std::string>());
    if (!kind) throw std::invalid_argument("unknown structural rule '" + by.at("struct").get<std::string>() + "'");
    return ByStruct{*kind, by.contains("from") ? refs(by.at("from")) : std::vector<int>{}};
  }
  if (!by.contains("rule")) throw std::invalid_argument("\"by\" needs one of axiom, paxiom, rule, struct");
  const auto rule = by.at("rule").get<std::string>();
  if (rule == "taut" || rule == "Taut") return ByTaut{};
  if (rule == "MP") {
    auto r = refs(by.at("from"));
    if (r.size() != 2) throw std::invalid_argument("MP takes two premises");
    return ByMP{r[0], r[1]};
  }
  if (rule == "Gen") return ByGen{single_ref(by), parse_program(by.at("program").get<std::string>())};
  if (rule == "USub")
    return ByUSub{single_ref(by), by.at("prop").get<std::string>(), parse_formula(by.at("formula").get<std::string>())};
  if (rule == "PSub") return ByPSub{single_ref(by), by.at("judgement").get<int>()};
  if (rule == "TP") return ByTP{single_ref(by)};
  throw std::invalid_argument("unknown rule '" + rule + "'");
}

json justification_to_json(const Justification& j) {
  struct V {
    json operator()(const ByTaut&) const { return {{"rule", "taut"}}; }
    json operator()(const ByAxiom& a) const {
      json o{{"axiom", a.name}};
      if (a.binding) o["binding"] = to_json(*a.binding);
      return o;
    }
    json operator()(const ByProgramAxiom& a) const {
      json o{{"paxiom", a.name}};
      if (a.binding) o["binding"] = to_json(*a.binding);
      return o;
    }
    json operator()(const ByMP& m) const { return {{"rule", "MP"}, {"from", {m.premise, m.implication}}}; }
    json operator()(const ByGen& g) const { return {{"rule", "Gen"}, {"from", g.from}, {"program", render(g.program)}}; }
    json operator()(const ByUSub& u) const {
      return {{"rule", "USub"}, {"from", u.from}, {"prop", u.prop}, {"formula", render(u.formula)}};
    }
    json operator()(const ByPSub& p) const { return {{"rule", "PSub"}, {"from", p.from}, {"judgement", p.judgement}}; }
    json operator()(const ByStruct& s) const {
      json o{{"struct", to_string(s.kind)}};
      if (!s.from.empty()) o["from"] = s.from;
      return o;
    }
    json operator()(const ByTP& t) const { return {{"rule", "TP"}, {"from", t.from}}; }
  };
  return std::visit(V{}, j);
}

}  // namespace

Proof proof_from_json(const json& j) {
  const json& lines = j.is_array() ? j : j.at("lines");
  if (!lines.is_array()) throw std::invalid_argument("\"lines\" must be an array");
  Proof proof;
  for (const auto& l : lines) {
    ProofLine line;
    line.id = l.at("id").get<int>();
    line.statement = parse_statement(l.at("stmt").get<std::string>());
    line.by = justification_from_json(l.at("by"));
    proof.push_back(std::move(line));
  }
  return proof;
}

json to_json(const Proof& proof) {
  json lines = json::array();
  for (const auto& l : proof)
    lines.push_back({{"id", l.id}, {"stmt", render(l.statement)}, {"by", justification_to_json(l.by)}});
  return json{{"lines", lines}};
}

// ---------------------------------------------------------------------------
// Closure properties

bool closed_under_entailment(const Theory& t, const std::set<Formula>& universe, const Entailment& entails) {
  for (const auto& f : universe)
    if (!t.count(f) && entails(t, f)) return false;
  return true;
}

bool conjunction_property(const Theory& t, const std::set<Formula>& universe) {
  for (const auto& f : universe) {
    auto parts = split_conj(f);
    if (parts && t.count(f) != (t.count(parts->first) && t.count(parts->second))) return false;
  }
  return true;
}

bool disjunction_property(const Theory& t, const std::set<Formula>& universe) {
  for (const auto& f : universe) {
    if (f.kind() != FormulaKind::Or) continue;
    if (t.count(f) != (t.count(f.lhs()) || t.count(f.rhs()))) return false;
  }
  return true;
}

bool negation_property(const Theory& t, const std::set<Formula>& universe) {
  for (const auto& f : universe) {
    if (f.kind() != FormulaKind::Not) continue;
    if (t.count(f.operand()) == t.count(f)) return false;
  }
  return true;
}

namespace {
void subformulas(const Formula& f, std::set<Formula>& out);

void subformulas(const Program& a, std::set<Formula>& out) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return;
    case ProgramKind::Test:
      subformulas(a.condition(), out);
      return;
    default:
      subformulas(a.lhs(), out);
      subformulas(a.rhs(), out);
  }
}

void subformulas(const Formula& f, std::set<Formula>& out) {
  if (!out.insert(f).second) return;
  switch (f.kind()) {
    case FormulaKind::Not:
      subformulas(f.operand(), out);
      return;
    case FormulaKind::Or:
      subformulas(f.lhs(), out);
      subformulas(f.rhs(), out);
      return;
    case FormulaKind::Diamond:
      subformulas(f.program(), out);
      subformulas(f.body(), out);
      return;
    default:
      return;
  }
}
}  // namespace

std::set<Formula> closure_universe(const std::vector<Formula>& seeds) {
  std::set<Formula> out;
  for (const auto& f : seeds) subformulas(f, out);
  std::set<Formula> negs;
  for (const auto& f : out) negs.insert(Formula::negation(f));
  out.insert(negs.begin(), negs.end());
  return out;
}

}  // namespace pdl
