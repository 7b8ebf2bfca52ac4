#include "pdlkit/parser.hpp"

#include <cctype>
#include <sstream>
#include <utility>
#include <vector>

namespace pdl {
namespace {

enum class Tok {
  Ident, True, False, Not, And, Or, Implies, Iff, LAngle, RAngle, LBrack, RBrack,
  LParen, RParen, Semi, Plus, Quest, Caret, PImplies, PIff, End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

// Unicode spellings accepted alongside the ASCII ones.
struct Alias {
  std::string_view utf8;
  Tok kind;
};
constexpr Alias kAliases[] = {
    {"⊤", Tok::True},    {"⊥", Tok::False},  {"¬", Tok::Not},
    {"∧", Tok::And},     {"∩", Tok::And},    {"∨", Tok::Or},
    {"∪", Tok::Plus},    {"↔", Tok::Iff},    {"→", Tok::Implies},
    {"⟨", Tok::LAngle},  {"⟩", Tok::RAngle}, {"⇔", Tok::PIff},
    {"⇒", Tok::PImplies}, {"⟲", Tok::Caret}, {"↺", Tok::Caret},
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto starts = [&](std::string_view t) { return s.substr(i, t.size()) == t; };
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t at = i;
    if (std::islower(c)) {
      std::size_t j = i;
      while (j < s.size() && (std::islower(static_cast<unsigned char>(s[j])) ||
                              std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      std::string word(s.substr(i, j - i));
      Tok k = word == "true" ? Tok::True : word == "false" ? Tok::False : Tok::Ident;
      out.push_back({k, std::move(word), at});
      i = j;
      continue;
    }
    bool matched = false;
    for (const auto& a : kAliases) {
      if (starts(a.utf8)) {
        out.push_back({a.kind, std::string(a.utf8), at});
        i += a.utf8.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::pair<std::string_view, Tok> kSymbols[] = {
        {"<=>", Tok::PIff}, {"<->", Tok::Iff}, {"=>", Tok::PImplies}, {"->", Tok::Implies},
        {"~", Tok::Not},    {"&", Tok::And},   {"|", Tok::Or},        {"<", Tok::LAngle},
        {">", Tok::RAngle}, {"[", Tok::LBrack}, {"]", Tok::RBrack},   {"(", Tok::LParen},
        {")", Tok::RParen}, {";", Tok::Semi},  {"+", Tok::Plus},      {"?", Tok::Quest},
        {"^", Tok::Caret},  {"!", Tok::Not},
    };
    for (const auto& [text, kind] : kSymbols) {
      if (starts(text)) {
        out.push_back({kind, std::string(text), at});
        i += text.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError("unexpected character '" + std::string(1, s[i]) + "'", at);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Vocabulary* vocab) : toks_(lex(text)), vocab_(vocab) {}

  Formula whole_formula() {
    Formula f = iff();
    expect(Tok::End, "end of input");
    return f;
  }

  Program whole_program() {
    Program p = program();
    expect(Tok::End, "end of input");
    return p;
  }

  ProgramJudgement whole_judgement() {
    ProgramJudgement j;
    j.left = program();
    if (accept(Tok::PIff)) {
      j.kind = JudgementKind::Equiv;
    } else {
      expect(Tok::PImplies, "'=>' or '<=>'");
      j.kind = JudgementKind::Implies;
    }
    j.right = program();
    expect(Tok::End, "end of input");
    return j;
  }

  bool has_judgement_arrow() const {
    for (const auto& t : toks_)
      if (t.kind == Tok::PImplies || t.kind == Tok::PIff) return true;
    return false;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Tok::End ? ", found end of input" : ", found '" + t.text + "'"),
                     t.offset);
  }

  void check_sort(const std::string& name, bool is_prop) const {
    if (!vocab_) return;
    const auto& set = is_prop ? vocab_->props : vocab_->programs;
    if (!set.count(name))
      throw ParseError(std::string("unknown ") + (is_prop ? "proposition" : "program") + " '" +
                           name + "'",
                       peek().offset);
  }

  // formula := imp ('<->' formula)?
  Formula iff() {
    Formula lhs = implication();
    if (accept(Tok::Iff)) return pdl::iff(lhs, iff());
    return lhs;
  }
  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::Implies)) return impl(lhs, implication());
    return lhs;
  }
  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::Or)) f = Formula::disjunction(f, conjunction());
    return f;
  }
  Formula conjunction() {
    Formula f = unary();
    while (accept(Tok::And)) f = conj(f, unary());
    return f;
  }
  Formula unary() {
    if (accept(Tok::Not)) return Formula::negation(unary());
    if (accept(Tok::LAngle)) {
      Program p = program();
      expect(Tok::RAngle, "'>'");
      return Formula::diamond(p, unary());
    }
    if (accept(Tok::LBrack)) {
      Program p = program();
      expect(Tok::RBrack, "']'");
      return box(p, unary());
    }
    if (accept(Tok::True)) return verum();
    if (accept(Tok::False)) return Formula::falsum();
    if (at(Tok::Ident)) {
      std::string name = peek().text;
      check_sort(name, true);
      ++pos_;
      return Formula::prop(std::move(name));
    }
    if (accept(Tok::LParen)) {
      Formula f = iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    fail("expected a formula");
  }

  // program := inter ('+' inter)*
  Program program() {
    Program p = intersection();
    while (accept(Tok::Plus)) p = Program::choice(p, intersection());
    return p;
  }
  Program intersection() {
    Program p = sequence();
    while (accept(Tok::And)) p = Program::inter(p, sequence());
    return p;
  }
  Program sequence() {
    Program p = postfix();
    while (accept(Tok::Semi)) p = Program::seq(p, postfix());
    return p;
  }
  Program postfix() {
    Program p = primary();
    while (accept(Tok::Caret)) p = loop(p);
    return p;
  }
  Program primary() {
    // An identifier is an atomic program unless a '?' follows it.
    if (at(Tok::Ident) && toks_[pos_ + 1].kind != Tok::Quest) {
      std::string name = peek().text;
      check_sort(name, false);
      ++pos_;
      return Program::atomic(std::move(name));
    }
    if (at(Tok::LParen)) {
      std::size_t save = pos_;
      try {
        ++pos_;
        Program p = program();
        expect(Tok::RParen, "')'");
        if (!at(Tok::Quest)) return p;
      } catch (const ParseError&) {
      }
      pos_ = save;
    }
    Formula cond = unary();
    expect(Tok::Quest, "'?' after test formula");
    return Program::test(cond);
  }

  std::vector<Token> toks_;
  const Vocabulary* vocab_;
  std::size_t pos_ = 0;
};

// Precedence levels; higher binds tighter.
enum FLevel { F_IFF = 1, F_IMP, F_OR, F_AND, F_UNARY };
enum PLevel { P_UNION = 1, P_INTER, P_SEQ, P_POSTFIX };

struct Printer {
  RenderOptions opt;
  std::ostringstream out;

  static bool as_conj(const Formula& f, Formula& a, Formula& b) {
    if (f.kind() != FormulaKind::Not || f.operand().kind() != FormulaKind::Or) return false;
    const Formula& o = f.operand();
    if (o.lhs().kind() != FormulaKind::Not || o.rhs().kind() != FormulaKind::Not) return false;
    a = o.lhs().operand();
    b = o.rhs().operand();
    return true;
  }
  static bool as_impl(const Formula& f, Formula& a, Formula& b) {
    if (f.kind() != FormulaKind::Or || f.lhs().kind() != FormulaKind::Not) return false;
    a = f.lhs().operand();
    b = f.rhs();
    return true;
  }
  static bool as_iff(const Formula& f, Formula& a, Formula& b) {
    Formula l, r, a2, b2;
    if (!as_conj(f, l, r) || !as_impl(l, a, b) || !as_impl(r, b2, a2)) return false;
    return a == a2 && b == b2;
  }

  int level(const Formula& f) const {
    Formula a, b;
    if (!opt.sugar) return f.kind() == FormulaKind::Or ? F_OR : F_UNARY;
    if (as_iff(f, a, b)) return F_IFF;
    if (as_impl(f, a, b)) return F_IMP;
    if (f.kind() == FormulaKind::Or) return F_OR;
    if (as_conj(f, a, b)) return F_AND;
    return F_UNARY;
  }

  void formula(const Formula& f, int min_level) {
    bool paren = level(f) < min_level;
    if (paren) out << '(';
    formula_body(f);
    if (paren) out << ')';
  }

  void formula_body(const Formula& f) {
    Formula a, b;
    if (opt.sugar) {
      if (as_iff(f, a, b)) {
        formula(a, F_IMP);
        out << " <-> ";
        formula(b, F_IFF);
        return;
      }
      if (as_impl(f, a, b)) {
        formula(a, F_OR);
        out << " -> ";
        formula(b, F_IMP);
        return;
      }
      if (as_conj(f, a, b)) {
        formula(a, F_AND);
        out << " & ";
        formula(b, F_UNARY);
        return;
      }
      if (is_verum(f)) {
        out << "true";
        return;
      }
      if (f.kind() == FormulaKind::Not && f.operand().kind() == FormulaKind::Diamond &&
          f.operand().body().kind() == FormulaKind::Not) {
        out << '[';
        program(f.operand().program(), P_UNION);
        out << ']';
        formula(f.operand().body().operand(), F_UNARY);
        return;
      }
    }
    switch (f.kind()) {
      case FormulaKind::False:
        out << "false";
        return;
      case FormulaKind::Prop:
        out << f.name();
        return;
      case FormulaKind::Not:
        out << '~';
        formula(f.operand(), F_UNARY);
        return;
      case FormulaKind::Or:
        formula(f.lhs(), F_OR);
        out << " | ";
        formula(f.rhs(), F_AND);
        return;
      case FormulaKind::Diamond:
        out << '<';
        program(f.program(), P_UNION);
        out << '>';
        formula(f.body(), F_UNARY);
        return;
    }
  }

  int level(const Program& p) const {
    if (opt.sugar && loop_body(p)) return P_POSTFIX;
    switch (p.kind()) {
      case ProgramKind::Union: return P_UNION;
      case ProgramKind::Inter: return P_INTER;
      case ProgramKind::Seq: return P_SEQ;
      default: return P_POSTFIX;
    }
  }

  void program(const Program& p, int min_level) {
    bool paren = level(p) < min_level;
    if (paren) out << '(';
    program_body(p);
    if (paren) out << ')';
  }

  void program_body(const Program& p) {
    if (opt.sugar) {
      if (const Program* body = loop_body(p)) {
        program(*body, P_POSTFIX);
        out << '^';
        return;
      }
    }
    switch (p.kind()) {
      case ProgramKind::Atomic:
        out << p.name();
        return;
      case ProgramKind::Test:
        // A parenthesised test must not be mistaken for a parenthesised
        // program, so tests always print their formula at unary level.
        formula(p.condition(), F_UNARY);
        out << '?';
        return;
      case ProgramKind::Seq:
        program(p.lhs(), P_SEQ);
        out << ';';
        program(p.rhs(), P_POSTFIX);
        return;
      case ProgramKind::Inter:
        program(p.lhs(), P_INTER);
        out << " & ";
        program(p.rhs(), P_SEQ);
        return;
      case ProgramKind::Union:
        program(p.lhs(), P_UNION);
        out << " + ";
        program(p.rhs(), P_INTER);
        return;
    }
  }
};

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text, nullptr).whole_formula(); }
Formula parse_formula(std::string_view text, const Vocabulary& vocab) {
  return Parser(text, &vocab).whole_formula();
}
Program parse_program(std::string_view text) { return Parser(text, nullptr).whole_program(); }
Program parse_program(std::string_view text, const Vocabulary& vocab) {
  return Parser(text, &vocab).whole_program();
}
ProgramJudgement parse_judgement(std::string_view text) {
  return Parser(text, nullptr).whole_judgement();
}
ProgramJudgement parse_judgement(std::string_view text, const Vocabulary& vocab) {
  return Parser(text, &vocab).whole_judgement();
}

Statement parse_statement(std::string_view text) {
  Parser p(text, nullptr);
  if (p.has_judgement_arrow()) return p.whole_judgement();
  return p.whole_formula();
}
Statement parse_statement(std::string_view text, const Vocabulary& vocab) {
  Parser p(text, &vocab);
  if (p.has_judgement_arrow()) return p.whole_judgement();
  return p.whole_formula();
}

std::string render(const Formula& f, RenderOptions options) {
  Printer pr{options, {}};
  pr.formula(f, F_IFF);
  return pr.out.str();
}

std::string render(const Program& p, RenderOptions options) {
  Printer pr{options, {}};
  pr.program(p, P_UNION);
  return pr.out.str();
}

std::string render(const ProgramJudgement& j, RenderOptions options) {
  return render(j.left, options) + (j.kind == JudgementKind::Implies ? " => " : " <=> ") +
         render(j.right, options);
}

std::string render(const Statement& s, RenderOptions options) {
  return std::visit([&](const auto& v) { return render(v, options); }, s);
}

std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << render(f); }
std::ostream& operator<<(std::ostream& os, const Program& p) { return os << render(p); }
std::ostream& operator<<(std::ostream& os, const ProgramJudgement& j) { return os << render(j); }

std::string_view grammar_summary() {
  return R"(formula  ::= imp [ '<->' formula ]
imp      ::= or [ '->' imp ]
or       ::= and { '|' and }
and      ::= unary { '&' unary }
unary    ::= '~' unary | '<' program '>' unary | '[' program ']' unary
           | 'true' | 'false' | ident | '(' formula ')'
program  ::= inter { '+' inter }
inter    ::= seq { '&' seq }
seq      ::= post { ';' post }
post     ::= prim { '^' }                  a^ abbreviates a & true?
prim     ::= ident | '(' program ')' | unary '?'
judgement::= program ('=>' | '<=>') program
ident    ::= [a-z][a-z0-9_]*
Binary formula connectives: & binds tighter than |, | tighter than ->,
-> tighter than <->; -> and <-> group to the right.  In programs ';' binds
tighter than '&' (intersection), which binds tighter than '+' (union).
)";
}

}  // namespace pdl
