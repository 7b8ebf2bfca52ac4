#include "pdlkit/normal_form.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdl {

std::string to_string(ProgramClass c) {
  switch (c) {
    case ProgramClass::Cyc: return "Cyc";
    case ProgramClass::Forw: return "Forw";
    case ProgramClass::Neither: return "Neither";
  }
  return "?";
}

namespace {

bool is_forw(const Program& a);

bool is_cyc(const Program& a) {
  if (a.kind() == ProgramKind::Test) return true;
  return a.kind() == ProgramKind::Inter && a.rhs().kind() == ProgramKind::Test && is_forw(a.lhs());
}

bool is_forw(const Program& a) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return true;
    case ProgramKind::Inter:
      return is_forw(a.lhs()) && is_forw(a.rhs());
    case ProgramKind::Seq: {
      const Program& l = a.lhs();
      const Program& r = a.rhs();
      if (l.kind() == ProgramKind::Seq && is_forw(l.lhs()) && is_cyc(l.rhs()) && is_forw(r)) return true;
      return r.kind() == ProgramKind::Seq && is_forw(l) && is_cyc(r.lhs()) && is_forw(r.rhs());
    }
    default:
      return false;
  }
}

}  // namespace

ProgramClass classify(const Program& a) {
  if (is_forw(a)) return ProgramClass::Forw;
  if (is_cyc(a)) return ProgramClass::Cyc;
  return ProgramClass::Neither;
}

Formula cyc_to_test(const Program& a) {
  if (!is_cyc(a)) throw std::invalid_argument("cyc_to_test: program is not cyclic");
  if (a.kind() == ProgramKind::Test) return a.condition();
  return conj(Formula::diamond(loop(a.lhs()), verum()), a.rhs().condition());
}

std::string axioms_label(const RewriteStep& step) {
  std::string out;
  for (const auto& a : step.axioms) {
    if (!out.empty()) out += ",";
    out += a;
  }
  return out;
}

Term replay(const Term& input, const RewriteTrace& trace) {
  Term cur = input;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    if (subterm_at(cur, s.position) != s.before)
      throw std::logic_error("replay: step " + std::to_string(i + 1) + " does not match at " +
                             to_string(s.position));
    cur = replace_at(cur, s.position, s.after);
  }
  return cur;
}

namespace {

// Conjunction that drops a literal true operand.
Formula and_(const Formula& a, const Formula& b) {
  if (is_verum(a)) return b;
  if (is_verum(b)) return a;
  return conj(a, b);
}

void note(std::vector<std::string>& axioms, const std::string& name) {
  if (std::find(axioms.begin(), axioms.end(), name) == axioms.end()) axioms.push_back(name);
}

// A union-free program read as c0? ; F1 ; c1? ; ... ; Fk ; ck? with every Fi
// forward and every ci a formula.  tests.size() == steps.size() + 1.
struct Chain {
  std::vector<Formula> tests;
  std::vector<Program> steps;
};

// F1 ; c1? ; F2 ; ... ; Fk, left associated, true? kept between steps.
Program interior(const Chain& c) {
  Program out = c.steps.front();
  for (std::size_t i = 1; i < c.steps.size(); ++i)
    out = Program::seq(Program::seq(out, Program::test(c.tests[i])), c.steps[i]);
  return out;
}

Chain concat(Chain a, const Chain& b, std::vector<std::string>& axioms) {
  Formula& join = a.tests.back();
  if (!is_verum(join) && !is_verum(b.tests.front())) {
    note(axioms, ";");
    note(axioms, "?");
  } else if (!a.steps.empty() && !b.steps.empty() && is_verum(join) && is_verum(b.tests.front())) {
    // padding between adjacent forward steps
    note(axioms, ";");
    note(axioms, "?");
  }
  join = and_(join, b.tests.front());
  a.tests.insert(a.tests.end(), b.tests.begin() + 1, b.tests.end());
  a.steps.insert(a.steps.end(), b.steps.begin(), b.steps.end());
  return a;
}

// (c0? ; X ; ck?) & t?  is  (t & c0 & ck & <X^loop>true)?
Formula loop_test(const Chain& c, const Formula& t) {
  return and_(and_(t, and_(c.tests.front(), c.tests.back())),
              Formula::diamond(loop(interior(c)), verum()));
}

Chain intersect(const Chain& a, const Chain& b, std::vector<std::string>& axioms) {
  if (a.steps.empty() && b.steps.empty()) {
    note(axioms, "T");
    note(axioms, "?");
    return Chain{{and_(a.tests.front(), b.tests.front())}, {}};
  }
  if (a.steps.empty() || b.steps.empty()) {
    const Chain& path = a.steps.empty() ? b : a;
    const Formula& t = a.steps.empty() ? a.tests.front() : b.tests.front();
    if (a.steps.empty()) note(axioms, "Cm");
    note(axioms, "T");
    return Chain{{loop_test(path, t)}, {}};
  }
  const Formula& a0 = a.tests.front();
  const Formula& b0 = b.tests.front();
  const Formula& ak = a.tests.back();
  const Formula& bk = b.tests.back();
  if (!is_verum(ak) || !is_verum(bk)) note(axioms, "T2");
  if (!is_verum(a0) || !is_verum(b0)) note(axioms, "T3");
  if (!is_verum(bk) || !is_verum(b0)) note(axioms, "Cm");
  return Chain{{and_(a0, b0), and_(ak, bk)}, {Program::inter(interior(a), interior(b))}};
}

Chain chain_of(const Program& a, std::vector<std::string>& axioms) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return Chain{{verum(), verum()}, {a}};
    case ProgramKind::Test:
      return Chain{{a.condition()}, {}};
    case ProgramKind::Seq:
      return concat(chain_of(a.lhs(), axioms), chain_of(a.rhs(), axioms), axioms);
    case ProgramKind::Inter:
      return intersect(chain_of(a.lhs(), axioms), chain_of(a.rhs(), axioms), axioms);
    case ProgramKind::Union:
      break;
  }
  throw std::logic_error("chain_of: union inside an alternative");
}

// Union-free alternatives whose union is equivalent to a.
std::vector<Program> alternatives(const Program& a, std::vector<std::string>& axioms) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
    case ProgramKind::Test:
      return {a};
    case ProgramKind::Union: {
      auto l = alternatives(a.lhs(), axioms);
      auto r = alternatives(a.rhs(), axioms);
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    case ProgramKind::Seq:
    case ProgramKind::Inter: {
      auto l = alternatives(a.lhs(), axioms);
      auto r = alternatives(a.rhs(), axioms);
      const bool seq = a.kind() == ProgramKind::Seq;
      if (l.size() > 1) {
        if (!seq) note(axioms, "Cm");
        note(axioms, seq ? "D3" : "D1");
      }
      if (r.size() > 1) note(axioms, seq ? "D4" : "D1");
      if (l.size() == 1 && r.size() == 1) return {a};
      std::vector<Program> out;
      for (const auto& x : l)
        for (const auto& y : r) out.push_back(seq ? Program::seq(x, y) : Program::inter(x, y));
      return out;
    }
  }
  return {a};
}

Program rebuild(const Chain& c) {
  if (c.steps.empty()) return Program::test(c.tests.front());
  Program out = interior(c);
  if (!is_verum(c.tests.front())) out = Program::seq(Program::test(c.tests.front()), out);
  if (!is_verum(c.tests.back())) out = Program::seq(out, Program::test(c.tests.back()));
  return out;
}

Formula emit(const Chain& c, const Formula& body, std::vector<std::string>& axioms) {
  if (c.steps.empty()) {
    note(axioms, "?");
    return and_(c.tests.front(), body);
  }
  if (!is_verum(c.tests.front()) || !is_verum(c.tests.back())) {
    note(axioms, ";");
    note(axioms, "?");
  }
  return and_(c.tests.front(), Formula::diamond(interior(c), and_(c.tests.back(), body)));
}

Formula disjoin(const std::vector<Formula>& fs) {
  Formula out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::disjunction(out, fs[i]);
  return out;
}

Path disjunct_path(Path at, std::size_t i, std::size_t n) {
  const std::size_t lefts = n - 1 - (i == 0 ? 0 : i);
  for (std::size_t j = 0; j < lefts; ++j) at.push_back(0);
  if (i > 0) at.push_back(1);
  return at;
}

class Normalizer {
 public:
  RewriteTrace trace;

  // Normalizes f, which sits at `at` in the term being rewritten.
  Formula formula(const Formula& f, Path& at) {
    switch (f.kind()) {
      case FormulaKind::False:
      case FormulaKind::Prop:
        return f;
      case FormulaKind::Not: {
        at.push_back(0);
        Formula g = formula(f.operand(), at);
        at.pop_back();
        return g == f.operand() ? f : Formula::negation(g);
      }
      case FormulaKind::Or: {
        at.push_back(0);
        Formula l = formula(f.lhs(), at);
        at.back() = 1;
        Formula r = formula(f.rhs(), at);
        at.pop_back();
        return (l == f.lhs() && r == f.rhs()) ? f : Formula::disjunction(l, r);
      }
      case FormulaKind::Diamond: {
        at.push_back(0);
        Program a = tests_in(f.program(), at);
        at.back() = 1;
        Formula g = formula(f.body(), at);
        at.pop_back();
        return diamond(a, g, at);
      }
    }
    return f;
  }

  // Normalizes the formulas inside the tests of a, which sits at `at`.
  Program tests_in(const Program& a, Path& at) {
    switch (a.kind()) {
      case ProgramKind::Atomic:
        return a;
      case ProgramKind::Test: {
        at.push_back(0);
        Formula c = formula(a.condition(), at);
        at.pop_back();
        return c == a.condition() ? a : Program::test(c);
      }
      default: {
        at.push_back(0);
        Program l = tests_in(a.lhs(), at);
        at.back() = 1;
        Program r = tests_in(a.rhs(), at);
        at.pop_back();
        if (l == a.lhs() && r == a.rhs()) return a;
        if (a.kind() == ProgramKind::Seq) return Program::seq(l, r);
        if (a.kind() == ProgramKind::Union) return Program::choice(l, r);
        return Program::inter(l, r);
      }
    }
  }

  Formula diamond(const Program& a, const Formula& body, const Path& at) {
    const Formula before = Formula::diamond(a, body);
    std::vector<std::string> lift;
    auto alts = alternatives(a, lift);
    if (alts.size() > 1) note(lift, "D");
    std::vector<Formula> parts;
    for (const auto& b : alts) parts.push_back(Formula::diamond(b, body));
    const Formula split = disjoin(parts);
    if (split != before) record(std::move(lift), at, before, split);
    for (std::size_t i = 0; i < alts.size(); ++i) {
      std::vector<std::string> used;
      Formula out = emit(chain_of(alts[i], used), body, used);
      if (out != parts[i]) record(std::move(used), disjunct_path(at, i, alts.size()), parts[i], out);
      parts[i] = out;
    }
    return disjoin(parts);
  }

  void record(std::vector<std::string> axioms, Path at, Term before, Term after) {
    trace.steps.push_back(RewriteStep{std::move(axioms), std::move(at), std::move(before), std::move(after)});
  }
};

bool normal_program(const Program& a);

bool normal(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::False:
    case FormulaKind::Prop:
      return true;
    case FormulaKind::Not:
      return normal(f.operand());
    case FormulaKind::Or:
      return normal(f.lhs()) && normal(f.rhs());
    case FormulaKind::Diamond: {
      const Program& a = f.program();
      if (is_forw(a)) return normal_program(a) && normal(f.body());
      const Program* body = loop_body(a);
      return body && is_forw(*body) && is_verum(f.body()) && normal_program(*body);
    }
  }
  return false;
}

bool normal_program(const Program& a) {
  switch (a.kind()) {
    case ProgramKind::Atomic:
      return true;
    case ProgramKind::Test:
      return normal(a.condition());
    default:
      return normal_program(a.lhs()) && normal_program(a.rhs());
  }
}

}  // namespace

std::pair<Formula, RewriteTrace> normalize(const Formula& f) {
  Normalizer n;
  Path at;
  Formula out = n.formula(f, at);
  return {out, std::move(n.trace)};
}

std::pair<Program, RewriteTrace> normalize_program_in_context(const Program& a) {
  Normalizer n;
  Path at;
  Program cur = n.tests_in(a, at);
  std::vector<std::string> lift;
  auto alts = alternatives(cur, lift);
  Program lifted = alts.front();
  for (std::size_t i = 1; i < alts.size(); ++i) lifted = Program::choice(lifted, alts[i]);
  if (lifted != cur) n.record(std::move(lift), {}, cur, lifted);
  cur = lifted;
  std::vector<Program> done;
  for (std::size_t i = 0; i < alts.size(); ++i) {
    std::vector<std::string> used;
    Program b = rebuild(chain_of(alts[i], used));
    done.push_back(b);
    Program next = done.front();
    for (std::size_t j = 1; j < alts.size(); ++j) next = Program::choice(next, j < done.size() ? done[j] : alts[j]);
    if (next != cur) n.record(std::move(used), {}, cur, next);
    cur = next;
  }
  return {cur, std::move(n.trace)};
}

bool in_normal_form(const Formula& f) { return normal(f); }

}  // namespace pdl
